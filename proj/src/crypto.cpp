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

#include "meid/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <algorithm>
#include <memory>

namespace meid::crypto {

namespace {

struct PkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct CtxDeleter {
  void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using PkeyCtxPtr = std::unique_ptr<EVP_PKEY_CTX, CtxDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;
using CipherCtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

int evp_key_type(GroupId group) {
  switch (group) {
    case GroupId::X25519: return EVP_PKEY_X25519;
    case GroupId::Ed25519: return EVP_PKEY_ED25519;
  }
  throw Error(Err::UnknownGroup);
}

PkeyPtr load_private(GroupId group, BytesView priv) {
  if (priv.size() != kPrivateKeyLen) throw Error(Err::InvalidElement, "bad private key length");
  PkeyPtr key(EVP_PKEY_new_raw_private_key(evp_key_type(group), nullptr, priv.data(),
                                           priv.size()));
  if (!key) throw Error(Err::InvalidElement, "private key rejected");
  return key;
}

PkeyPtr load_public(GroupId group, BytesView pub) {
  if (pub.size() != kPublicKeyLen) return nullptr;
  return PkeyPtr(
      EVP_PKEY_new_raw_public_key(evp_key_type(group), nullptr, pub.data(), pub.size()));
}

Bytes hmac_sha256(BytesView key, BytesView msg) {
  Bytes out(32);
  std::size_t out_len = out.size();
  if (!EVP_Q_mac(nullptr, "HMAC", nullptr, "SHA256", nullptr, key.data(), key.size(),
                 msg.data(), msg.size(), out.data(), out.size(), &out_len) ||
      out_len != 32) {
    throw Error(Err::AuthFailure, "HMAC computation failed");
  }
  return out;
}

void check_key(const SymmetricKey& key) {
  if (key.bytes.size() != kSymmetricKeyLen)
    throw Error(Err::InvalidElement, "bad symmetric key length");
}

}  // namespace

Bytes AeadCiphertext::serialize() const {
  ByteWriter w;
  w.raw(nonce);
  w.bytes(body);
  w.raw(tag);
  return w.take();
}

std::optional<AeadCiphertext> AeadCiphertext::parse(BytesView b) {
  ByteReader r(b);
  AeadCiphertext ct;
  ct.nonce = r.raw(kNonceLen);
  ct.body = r.bytes();
  ct.tag = r.raw(kTagLen);
  if (!r.done()) return std::nullopt;
  return ct;
}

bool NonceRegistry::record(const SymmetricKey& key, BytesView nonce) {
  Bytes fp = sha256(key.bytes);
  return used_.emplace(std::move(fp), Bytes(nonce.begin(), nonce.end())).second;
}

Challenge make_challenge(Rng& rng) { return Challenge{rng.bytes(kChallengeLen)}; }

SymmetricKey random_symmetric_key(KeyPurpose purpose, Rng& rng) {
  return SymmetricKey{purpose, rng.bytes(kSymmetricKeyLen)};
}

KeyPair generate_keypair(GroupId group, Rng& rng) {
  return keypair_from_private(group, rng.bytes(kPrivateKeyLen));
}

KeyPair keypair_from_private(GroupId group, BytesView private_part) {
  PkeyPtr key = load_private(group, private_part);
  Bytes pub(kPublicKeyLen);
  std::size_t len = pub.size();
  if (!EVP_PKEY_get_raw_public_key(key.get(), pub.data(), &len) || len != kPublicKeyLen)
    throw Error(Err::InvalidElement, "public key extraction failed");
  return KeyPair{group, Bytes(private_part.begin(), private_part.end()), std::move(pub)};
}

Outcome<Bytes> dh_agree(const KeyPair& own, GroupId peer_group, BytesView peer_public) {
  if (own.group != GroupId::X25519 || peer_group != GroupId::X25519)
    return Err::GroupMismatch;
  PkeyPtr self = load_private(own.group, own.private_part);
  PkeyPtr peer = load_public(peer_group, peer_public);
  if (!peer) return Err::InvalidElement;

  PkeyCtxPtr ctx(EVP_PKEY_CTX_new(self.get(), nullptr));
  Bytes secret(32);
  std::size_t len = secret.size();
  if (!ctx || EVP_PKEY_derive_init(ctx.get()) <= 0 ||
      EVP_PKEY_derive_set_peer(ctx.get(), peer.get()) <= 0 ||
      EVP_PKEY_derive(ctx.get(), secret.data(), &len) <= 0 || len != secret.size()) {
    return Err::InvalidElement;
  }
  return secret;
}

Bytes sign(const KeyPair& signer, BytesView message) {
  if (signer.group != GroupId::Ed25519) throw Error(Err::UnknownGroup, "not a signature group");
  PkeyPtr key = load_private(signer.group, signer.private_part);
  MdCtxPtr ctx(EVP_MD_CTX_new());
  Bytes sig(kSignatureLen);
  std::size_t len = sig.size();
  if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) <= 0 ||
      EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()) <= 0 ||
      len != kSignatureLen) {
    throw Error(Err::AuthFailure, "signing failed");
  }
  return sig;
}

bool verify(GroupId group, BytesView public_part, BytesView message, BytesView signature) {
  if (group != GroupId::Ed25519) throw Error(Err::UnknownGroup, "not a signature group");
  if (signature.size() != kSignatureLen) return false;
  PkeyPtr key = load_public(group, public_part);
  if (!key) return false;
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) <= 0)
    return false;
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(),
                          message.size()) == 1;
}

AeadCiphertext aead_encrypt(const SymmetricKey& key, BytesView nonce, BytesView plaintext,
                            BytesView aad, NonceRegistry& nonces) {
  check_key(key);
  if (nonce.size() != kNonceLen) throw Error(Err::InvalidElement, "bad nonce length");
  if (!nonces.record(key, nonce)) throw Error(Err::NonceReuse);

  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  AeadCiphertext out;
  out.nonce.assign(nonce.begin(), nonce.end());
  out.body.resize(plaintext.size());
  out.tag.resize(kTagLen);
  int len = 0;
  if (!ctx ||
      EVP_EncryptInit_ex(ctx.get(), EVP_chacha20_poly1305(), nullptr, key.bytes.data(),
                         nonce.data()) <= 0 ||
      (!aad.empty() &&
       EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) <=
           0) ||
      EVP_EncryptUpdate(ctx.get(), out.body.data(), &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) <= 0 ||
      EVP_EncryptFinal_ex(ctx.get(), out.body.data() + len, &len) <= 0 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_GET_TAG, static_cast<int>(kTagLen),
                          out.tag.data()) <= 0) {
    throw Error(Err::AuthFailure, "AEAD encryption failed");
  }
  return out;
}

std::optional<Bytes> aead_decrypt(const SymmetricKey& key, const AeadCiphertext& ct,
                                  BytesView aad) {
  check_key(key);
  if (ct.nonce.size() != kNonceLen || ct.tag.size() != kTagLen) return std::nullopt;

  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  Bytes plain(ct.body.size());
  Bytes tag = ct.tag;
  int len = 0;
  if (!ctx ||
      EVP_DecryptInit_ex(ctx.get(), EVP_chacha20_poly1305(), nullptr, key.bytes.data(),
                         ct.nonce.data()) <= 0 ||
      (!aad.empty() &&
       EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) <=
           0) ||
      EVP_DecryptUpdate(ctx.get(), plain.data(), &len, ct.body.data(),
                        static_cast<int>(ct.body.size())) <= 0 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, static_cast<int>(kTagLen),
                          tag.data()) <= 0) {
    return std::nullopt;
  }
  if (EVP_DecryptFinal_ex(ctx.get(), plain.data() + len, &len) <= 0) return std::nullopt;
  return plain;
}

Bytes mac(const SymmetricKey& key, BytesView message) {
  if (key.purpose != KeyPurpose::MAC && key.purpose != KeyPurpose::SESSION_MAC)
    throw Error(Err::WrongKeyPurpose);
  check_key(key);
  Bytes full = hmac_sha256(key.bytes, message);
  full.resize(kMacLen);
  return full;
}

bool mac_verify(const SymmetricKey& key, BytesView message, BytesView tag) {
  Bytes expected = mac(key, message);
  if (tag.size() != expected.size()) return false;
  return CRYPTO_memcmp(expected.data(), tag.data(), expected.size()) == 0;
}

SessionKeys derive_session_keys(const SymmetricKey& s_enc, const SymmetricKey& s_mac,
                                BytesView host_challenge, BytesView card_challenge) {
  if (s_enc.purpose != KeyPurpose::ENC || s_mac.purpose != KeyPurpose::MAC)
    throw Error(Err::WrongKeyPurpose);
  check_key(s_enc);
  check_key(s_mac);
  if (host_challenge.size() != kChallengeLen || card_challenge.size() != kChallengeLen)
    throw Error(Err::BadChallengeLength);

  Bytes base = concat({host_challenge, card_challenge});
  Bytes enc_input = concat({base, to_bytes("ENC")});
  Bytes mac_input = concat({base, to_bytes("MAC")});
  SessionKeys out;
  out.enc = SymmetricKey{KeyPurpose::SESSION_ENC, hmac_sha256(s_enc.bytes, enc_input)};
  out.mac = SymmetricKey{KeyPurpose::SESSION_MAC, hmac_sha256(s_mac.bytes, mac_input)};
  out.counter = 0;
  return out;
}

SymmetricKey kdf(BytesView shared_secret, BytesView label, KeyPurpose purpose) {
  if (label.empty()) throw Error(Err::EmptyLabel);
  return SymmetricKey{purpose, hmac_sha256(shared_secret, label)};
}

Bytes hybrid_seal(BytesView recipient_public, BytesView plaintext, BytesView aad, Rng& rng,
                  NonceRegistry& nonces) {
  KeyPair eph = generate_keypair(GroupId::X25519, rng);
  auto shared = dh_agree(eph, GroupId::X25519, recipient_public);
  if (!shared) throw Error(shared.error(), "hybrid seal agreement failed");
  Bytes info = concat({to_bytes("HYBRID-WRAP"), eph.public_part, recipient_public});
  SymmetricKey wrap{KeyPurpose::ENC, hmac_sha256(shared.value(), info)};
  // The wrap key is single-use, so an all-zero nonce is unique per (key, nonce).
  Bytes nonce(kNonceLen, 0);
  AeadCiphertext ct = aead_encrypt(wrap, nonce, plaintext, aad, nonces);
  ByteWriter w;
  w.raw(eph.public_part);
  w.raw(ct.serialize());
  return w.take();
}

std::optional<Bytes> hybrid_open(const KeyPair& recipient, BytesView blob, BytesView aad) {
  if (blob.size() < kPublicKeyLen) return std::nullopt;
  Bytes eph_pub(blob.begin(), blob.begin() + kPublicKeyLen);
  auto ct = AeadCiphertext::parse(blob.subspan(kPublicKeyLen));
  if (!ct) return std::nullopt;
  auto shared = dh_agree(recipient, GroupId::X25519, eph_pub);
  if (!shared) return std::nullopt;
  Bytes info = concat({to_bytes("HYBRID-WRAP"), eph_pub, recipient.public_part});
  SymmetricKey wrap{KeyPurpose::ENC, hmac_sha256(shared.value(), info)};
  return aead_decrypt(wrap, *ct, aad);
}

Bytes sha256(BytesView data) {
  Bytes out(32);
  unsigned int len = out.size();
  if (!EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) ||
      len != 32) {
    throw Error(Err::AuthFailure, "digest failed");
  }
  return out;
}

Bytes make_nonce(char l0, char l1, std::uint8_t direction, std::uint64_t counter) {
  Bytes nonce;
  nonce.reserve(kNonceLen);
  nonce.push_back(static_cast<std::uint8_t>(l0));
  nonce.push_back(static_cast<std::uint8_t>(l1));
  nonce.push_back(direction);
  nonce.push_back(0);
  for (int shift = 56; shift >= 0; shift -= 8)
    nonce.push_back(static_cast<std::uint8_t>(counter >> shift));
  return nonce;
}

}  // namespace meid::crypto
