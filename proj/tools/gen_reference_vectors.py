#!/usr/bin/env python3
# Copyright 2026 The meid-sim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Generates tests/reference_vectors.inc.

Independent reference implementation of the simulator's crypto layer, built on
the `cryptography` package. The C++ side must reproduce every vector bit for
bit; the vectors are frozen into the repository so the test suite never
depends on Python at build time.

Run from the repository root:  python3 tools/gen_reference_vectors.py
"""

import io
import os

from cryptography.hazmat.primitives import hashes, hmac
from cryptography.hazmat.primitives.asymmetric import ed25519, x25519
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305

MASK64 = (1 << 64) - 1


def splitmix64_stream(seed):
    state = seed & MASK64
    while True:
        state = (state + 0x9E3779B97F4A7C15) & MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        z ^= z >> 31
        yield z


def splitmix64_bytes(seed, n):
    out = bytearray()
    gen = splitmix64_stream(seed)
    while len(out) < n:
        out += next(gen).to_bytes(8, "little")
    return bytes(out[:n])


def hmac_sha256(key, msg):
    h = hmac.HMAC(key, hashes.SHA256())
    h.update(msg)
    return h.finalize()


def x25519_pub(priv):
    sk = x25519.X25519PrivateKey.from_private_bytes(priv)
    return sk.public_key().public_bytes_raw()


def x25519_agree(priv, peer_pub):
    sk = x25519.X25519PrivateKey.from_private_bytes(priv)
    return sk.exchange(x25519.X25519PublicKey.from_public_bytes(peer_pub))


def ed25519_pub(priv):
    return ed25519.Ed25519PrivateKey.from_private_bytes(priv).public_key().public_bytes_raw()


def ed25519_sign(priv, msg):
    return ed25519.Ed25519PrivateKey.from_private_bytes(priv).sign(msg)


SEEDS = [42, 7, 8, 1, 2]


def main():
    out = io.StringIO()
    out.write("// Generated by tools/gen_reference_vectors.py -- do not edit by hand.\n")
    out.write("// Reference values computed with the Python `cryptography` package.\n\n")

    def emit(name, cols, rows):
        out.write(f"// {{{', '.join(cols)}}}\n")
        out.write(f"static const char* const {name}[][{len(cols)}] = {{\n")
        for row in rows:
            out.write("    {" + ", ".join(f'"{v}"' for v in row) + "},\n")
        out.write("};\n\n")

    # SplitMix64 byte stream: seed -> first 32 bytes.
    rows = [(str(s), splitmix64_bytes(s, 32).hex()) for s in SEEDS]
    emit("kSplitmixVectors", ["seed", "bytes32_hex"], rows)

    # X25519 key generation: private = first 32 RNG bytes of the seed.
    rows = []
    for s in SEEDS:
        priv = splitmix64_bytes(s, 32)
        rows.append((str(s), priv.hex(), x25519_pub(priv).hex()))
    emit("kX25519KeygenVectors", ["seed", "priv_hex", "pub_hex"], rows)

    # X25519 agreement between seed pairs.
    rows = []
    for a, b in [(7, 8), (42, 1), (1, 2), (8, 42), (2, 7)]:
        pa = splitmix64_bytes(a, 32)
        pb = splitmix64_bytes(b, 32)
        shared = x25519_agree(pa, x25519_pub(pb))
        rows.append((pa.hex(), x25519_pub(pb).hex(), shared.hex()))
    emit("kX25519AgreeVectors", ["priv_a_hex", "pub_b_hex", "shared_hex"], rows)

    # Ed25519: keygen + deterministic signature over a fixed message.
    msgs = [b"", b"abc", b"eid token", b"terminal authentication", bytes(range(64))]
    rows = []
    for s, m in zip(SEEDS, msgs):
        priv = splitmix64_bytes(s ^ 0x5151, 32)
        rows.append((priv.hex(), ed25519_pub(priv).hex(), m.hex(), ed25519_sign(priv, m).hex()))
    emit("kEd25519Vectors", ["priv_hex", "pub_hex", "msg_hex", "sig_hex"], rows)

    # HMAC-SHA256 truncated to a 16-byte tag.
    rows = []
    for s, m in zip(SEEDS, msgs):
        key = splitmix64_bytes(s ^ 0xACAC, 32)
        rows.append((key.hex(), m.hex(), hmac_sha256(key, m)[:16].hex()))
    emit("kMacVectors", ["key_hex", "msg_hex", "tag16_hex"], rows)

    # Session key derivation from static keys and challenge pair.
    rows = []
    for s in SEEDS:
        s_enc = splitmix64_bytes(s ^ 0xE0C, 32)
        s_mac = splitmix64_bytes(s ^ 0x3AC, 32)
        hc = splitmix64_bytes(s ^ 0x110, 8)
        cc = splitmix64_bytes(s ^ 0x220, 8)
        enc = hmac_sha256(s_enc, hc + cc + b"ENC")
        mac = hmac_sha256(s_mac, hc + cc + b"MAC")
        rows.append((s_enc.hex(), s_mac.hex(), hc.hex(), cc.hex(), enc.hex(), mac.hex()))
    emit("kSessionKeyVectors",
         ["s_enc_hex", "s_mac_hex", "host_ch_hex", "card_ch_hex", "enc_hex", "mac_hex"], rows)

    # kdf(secret, label) = HMAC-SHA256(secret, label).
    labels = [b"ENC", b"MAC", b"TOKEN", b"WRAP", b"x"]
    rows = []
    for s, label in zip(SEEDS, labels):
        secret = splitmix64_bytes(s ^ 0xFDF, 32)
        rows.append((secret.hex(), label.hex(), hmac_sha256(secret, label).hex()))
    emit("kKdfVectors", ["secret_hex", "label_hex", "key_hex"], rows)

    # ChaCha20-Poly1305 AEAD. ct_hex holds body||tag as produced by the RFC construction.
    rows = []
    for i, s in enumerate(SEEDS):
        key = splitmix64_bytes(s ^ 0xAEAD, 32)
        nonce = splitmix64_bytes(s ^ 0x12, 12)
        aad = bytes([i]) * i
        pt = msgs[i]
        ct = ChaCha20Poly1305(key).encrypt(nonce, pt, aad)
        rows.append((key.hex(), nonce.hex(), aad.hex(), pt.hex(), ct.hex()))
    emit("kAeadVectors", ["key_hex", "nonce_hex", "aad_hex", "pt_hex", "ct_and_tag_hex"], rows)

    path = os.path.join(os.path.dirname(__file__), "..", "tests", "reference_vectors.inc")
    with open(path, "w") as f:
        f.write(out.getvalue())
    print(f"wrote {os.path.normpath(path)}")


if __name__ == "__main__":
    main()
