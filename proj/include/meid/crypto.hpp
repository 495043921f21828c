// Copyright 2026 The meid-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <optional>
#include <set>
#include <utility>

#include "meid/bytes.hpp"
#include "meid/errors.hpp"
#include "meid/rng.hpp"

namespace meid::crypto {

// Concrete algorithms stay behind this interface: X25519 for agreement,
// Ed25519 for signatures, ChaCha20-Poly1305 for AEAD, HMAC-SHA256 for MAC
// and key derivation. The rest of the simulator only sees these types.

enum class GroupId : std::uint8_t {
  X25519 = 1,   // key agreement
  Ed25519 = 2,  // signatures
};

enum class KeyPurpose : std::uint8_t {
  ENC = 1,
  MAC = 2,
  TOKEN = 3,
  SESSION_ENC = 4,
  SESSION_MAC = 5,
};

inline constexpr std::size_t kSymmetricKeyLen = 32;
inline constexpr std::size_t kPrivateKeyLen = 32;
inline constexpr std::size_t kPublicKeyLen = 32;
inline constexpr std::size_t kSignatureLen = 64;
inline constexpr std::size_t kChallengeLen = 8;
inline constexpr std::size_t kNonceLen = 12;
inline constexpr std::size_t kTagLen = 16;
inline constexpr std::size_t kMacLen = 16;

struct KeyPair {
  GroupId group = GroupId::X25519;
  Bytes private_part;  // 32 bytes; never serialized into envelopes
  Bytes public_part;   // 32 bytes
};

struct SymmetricKey {
  KeyPurpose purpose = KeyPurpose::ENC;
  Bytes bytes;  // always 32 bytes

  bool operator==(const SymmetricKey& o) const = default;
};

struct SessionKeys {
  SymmetricKey enc;  // SESSION_ENC
  SymmetricKey mac;  // SESSION_MAC
  std::uint64_t counter = 0;
};

struct Challenge {
  Bytes bytes;  // 8 bytes from the scenario RNG
};

Challenge make_challenge(Rng& rng);

struct AeadCiphertext {
  Bytes nonce;  // 12
  Bytes body;
  Bytes tag;  // 16

  Bytes serialize() const;
  static std::optional<AeadCiphertext> parse(BytesView b);
};

/// Tracks (key, nonce) pairs used within one scenario; a repeat is a caller
/// bug and throws NonceReuse from aead_encrypt.
class NonceRegistry {
 public:
  bool record(const SymmetricKey& key, BytesView nonce);

 private:
  std::set<std::pair<Bytes, Bytes>> used_;  // (key fingerprint, nonce)
};

SymmetricKey random_symmetric_key(KeyPurpose purpose, Rng& rng);

KeyPair generate_keypair(GroupId group, Rng& rng);
KeyPair keypair_from_private(GroupId group, BytesView private_part);

/// X25519 agreement. Both sides must be X25519 material; a zero shared
/// secret (low-order peer point) reports InvalidElement.
Outcome<Bytes> dh_agree(const KeyPair& own, GroupId peer_group, BytesView peer_public);

Bytes sign(const KeyPair& signer, BytesView message);
bool verify(GroupId group, BytesView public_part, BytesView message, BytesView signature);

AeadCiphertext aead_encrypt(const SymmetricKey& key, BytesView nonce, BytesView plaintext,
                            BytesView aad, NonceRegistry& nonces);
std::optional<Bytes> aead_decrypt(const SymmetricKey& key, const AeadCiphertext& ct,
                                  BytesView aad);

/// 16-byte tag; key purpose must be MAC or SESSION_MAC.
Bytes mac(const SymmetricKey& key, BytesView message);
/// Constant-time tag comparison.
bool mac_verify(const SymmetricKey& key, BytesView message, BytesView tag);

/// enc = PRF(s_enc, host || card || "ENC"), mac = PRF(s_mac, host || card || "MAC"),
/// counter = 0. Both challenges must be 8 bytes.
SessionKeys derive_session_keys(const SymmetricKey& s_enc, const SymmetricKey& s_mac,
                                BytesView host_challenge, BytesView card_challenge);

/// PRF-style derivation: HMAC-SHA256(secret, label). Label must be non-empty.
SymmetricKey kdf(BytesView shared_secret, BytesView label, KeyPurpose purpose);

/// Hybrid public-key encryption to an X25519 recipient: an ephemeral
/// agreement wraps an AEAD key; blob = eph_pub || nonce || body || tag.
Bytes hybrid_seal(BytesView recipient_public, BytesView plaintext, BytesView aad, Rng& rng,
                  NonceRegistry& nonces);
std::optional<Bytes> hybrid_open(const KeyPair& recipient, BytesView blob, BytesView aad);

Bytes sha256(BytesView data);

/// 12-byte deterministic nonce: 2-byte label, direction byte, zero byte,
/// 8-byte big-endian counter.
Bytes make_nonce(char l0, char l1, std::uint8_t direction, std::uint64_t counter);

}  // namespace meid::crypto
