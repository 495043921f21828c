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

#include "meid/eac.hpp"

namespace meid::eac {

namespace {

Bytes transcript_hash(BytesView challenge, BytesView commitment, BytesView ephemeral_pub,
                      BytesView chip_pub) {
  return crypto::sha256(concat({challenge, commitment, ephemeral_pub, chip_pub}));
}

crypto::SessionKeys derive_from_shared(BytesView shared, BytesView th) {
  Bytes secret = concat({shared, th});
  crypto::SessionKeys keys;
  keys.enc = crypto::kdf(secret, to_bytes("ENC"), crypto::KeyPurpose::SESSION_ENC);
  keys.mac = crypto::kdf(secret, to_bytes("MAC"), crypto::KeyPurpose::SESSION_MAC);
  keys.counter = 0;
  return keys;
}

Bytes confirm_mac(const crypto::SessionKeys& keys, BytesView th, std::string_view side) {
  return crypto::mac(keys.mac, concat({th, to_bytes(side)}));
}

}  // namespace

Bytes Message::encode() const {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(type));
  w.bytes(body);
  return w.take();
}

std::optional<Message> Message::decode(BytesView b) {
  ByteReader r(b);
  Message m;
  m.type = static_cast<MsgType>(r.u8());
  m.body = r.bytes();
  if (!r.done()) return std::nullopt;
  return m;
}

Message error_message(Err code) {
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(code));
  return Message{MsgType::Error, w.take()};
}

std::optional<Err> as_error(const Message& m) {
  if (m.type != MsgType::Error) return std::nullopt;
  ByteReader r(m.body);
  Err code = static_cast<Err>(r.u16());
  if (!r.done()) return Err::ParseError;
  return code;
}

Responder::Responder(pki::TrustAnchor cvca_anchor, crypto::KeyPair chip_keypair,
                     pki::CertChain chip_chain, const std::uint64_t* clock, Rng* rng,
                     std::vector<Bytes>* secret_log)
    : cvca_anchor_(std::move(cvca_anchor)),
      chip_keypair_(std::move(chip_keypair)),
      chip_chain_(std::move(chip_chain)),
      clock_(clock),
      rng_(rng),
      secret_log_(secret_log) {}

Message Responder::fail(Err code) {
  phase_ = Phase::Failed;
  return error_message(code);
}

Message Responder::handle(const Message& msg) {
  switch (phase_) {
    case Phase::AwaitTaRequest: {
      if (msg.type != MsgType::TaRequest) return fail(Err::EacStateError);
      auto chain = pki::CertChain::decode(msg.body);
      if (!chain) return fail(Err::TaChainInvalid);
      auto leaf = pki::verify_chain(cvca_anchor_, *chain, *clock_);
      if (!leaf || leaf.value().role != pki::Role::TERMINAL) return fail(Err::TaChainInvalid);
      terminal_leaf_ = leaf.value();
      challenge_ = crypto::make_challenge(*rng_).bytes;
      phase_ = Phase::AwaitTaResponse;
      return Message{MsgType::TaChallenge, challenge_};
    }
    case Phase::AwaitTaResponse: {
      if (msg.type != MsgType::TaResponse) return fail(Err::EacStateError);
      ByteReader r(msg.body);
      Bytes commitment = r.raw(32);
      Bytes sig = r.bytes();
      if (!r.done()) return fail(Err::TaSignatureInvalid);
      Bytes signed_data = concat({challenge_, commitment});
      if (!crypto::verify(terminal_leaf_->key_group, terminal_leaf_->public_part, signed_data,
                          sig)) {
        return fail(Err::TaSignatureInvalid);
      }
      commitment_ = std::move(commitment);
      phase_ = Phase::TaAccepted;
      return Message{MsgType::TaOk, {}};
    }
    case Phase::TaAccepted: {
      if (msg.type != MsgType::CaRequest) return fail(Err::EacStateError);
      const Bytes& eph_pub = msg.body;
      if (crypto::sha256(eph_pub) != commitment_) return fail(Err::CaCommitmentMismatch);
      auto shared = crypto::dh_agree(chip_keypair_, crypto::GroupId::X25519, eph_pub);
      if (!shared) return fail(Err::CaKeyConfirmFailed);
      transcript_hash_ =
          transcript_hash(challenge_, commitment_, eph_pub, chip_keypair_.public_part);
      session_keys_ = derive_from_shared(shared.value(), transcript_hash_);
      if (secret_log_) {
        secret_log_->push_back(session_keys_->enc.bytes);
        secret_log_->push_back(session_keys_->mac.bytes);
      }
      ByteWriter w;
      w.bytes(chip_chain_.encode());
      w.bytes(confirm_mac(*session_keys_, transcript_hash_, "RESP"));
      phase_ = Phase::AwaitCaConfirm;
      return Message{MsgType::CaResponse, w.take()};
    }
    case Phase::AwaitCaConfirm: {
      if (msg.type != MsgType::CaConfirm) return fail(Err::EacStateError);
      Bytes expected = confirm_mac(*session_keys_, transcript_hash_, "INIT");
      if (msg.body != expected) {
        session_keys_.reset();
        return fail(Err::CaKeyConfirmFailed);
      }
      phase_ = Phase::CaAccepted;
      return Message{MsgType::CaOk, {}};
    }
    case Phase::CaAccepted:
    case Phase::Failed:
      return fail(Err::EacStateError);
  }
  return fail(Err::EacStateError);
}

Initiator::Initiator(const crypto::KeyPair* terminal_keypair,
                     const pki::CertChain* terminal_chain, const pki::TrustAnchor* csca_anchor,
                     const std::uint64_t* clock, Rng* rng, std::vector<Bytes>* secret_log)
    : terminal_keypair_(terminal_keypair),
      terminal_chain_(terminal_chain),
      csca_anchor_(csca_anchor),
      clock_(clock),
      rng_(rng),
      secret_log_(secret_log) {}

Message Initiator::start() {
  phase_ = Phase::AwaitChallenge;
  return Message{MsgType::TaRequest, terminal_chain_->encode()};
}

Outcome<std::optional<Message>> Initiator::handle(const Message& msg) {
  if (auto err = as_error(msg)) {
    phase_ = Phase::Failed;
    return *err;
  }
  switch (phase_) {
    case Phase::AwaitChallenge: {
      if (msg.type != MsgType::TaChallenge || msg.body.size() != crypto::kChallengeLen) {
        phase_ = Phase::Failed;
        return Err::EacStateError;
      }
      challenge_ = msg.body;
      ephemeral_ = crypto::generate_keypair(crypto::GroupId::X25519, *rng_);
      if (secret_log_) secret_log_->push_back(ephemeral_.private_part);
      commitment_ = crypto::sha256(ephemeral_.public_part);
      Bytes sig = crypto::sign(*terminal_keypair_, concat({challenge_, commitment_}));
      ByteWriter w;
      w.raw(commitment_);
      w.bytes(sig);
      phase_ = Phase::AwaitTaOk;
      return std::optional<Message>(Message{MsgType::TaResponse, w.take()});
    }
    case Phase::AwaitTaOk: {
      if (msg.type != MsgType::TaOk) {
        phase_ = Phase::Failed;
        return Err::EacStateError;
      }
      phase_ = Phase::AwaitCaResponse;
      return std::optional<Message>(Message{MsgType::CaRequest, ephemeral_.public_part});
    }
    case Phase::AwaitCaResponse: {
      if (msg.type != MsgType::CaResponse) {
        phase_ = Phase::Failed;
        return Err::EacStateError;
      }
      ByteReader r(msg.body);
      auto chain = pki::CertChain::decode(r.bytes());
      Bytes responder_mac = r.bytes();
      if (!chain || !r.done()) {
        phase_ = Phase::Failed;
        return Err::CaChainInvalid;
      }
      auto leaf = pki::verify_chain(*csca_anchor_, *chain, *clock_);
      if (!leaf || leaf.value().role != pki::Role::CHIP ||
          leaf.value().key_group != crypto::GroupId::X25519) {
        phase_ = Phase::Failed;
        return Err::CaChainInvalid;
      }
      chip_leaf_ = leaf.value();
      auto shared =
          crypto::dh_agree(ephemeral_, crypto::GroupId::X25519, chip_leaf_->public_part);
      if (!shared) {
        phase_ = Phase::Failed;
        return Err::CaKeyConfirmFailed;
      }
      transcript_hash_ = transcript_hash(challenge_, commitment_, ephemeral_.public_part,
                                         chip_leaf_->public_part);
      session_keys_ = derive_from_shared(shared.value(), transcript_hash_);
      if (responder_mac != confirm_mac(*session_keys_, transcript_hash_, "RESP")) {
        phase_ = Phase::Failed;
        session_keys_.reset();
        return Err::CaKeyConfirmFailed;
      }
      phase_ = Phase::AwaitCaOk;
      return std::optional<Message>(
          Message{MsgType::CaConfirm, confirm_mac(*session_keys_, transcript_hash_, "INIT")});
    }
    case Phase::AwaitCaOk: {
      if (msg.type != MsgType::CaOk) {
        phase_ = Phase::Failed;
        return Err::EacStateError;
      }
      phase_ = Phase::Done;
      return std::optional<Message>(std::nullopt);
    }
    case Phase::Idle:
    case Phase::Done:
    case Phase::Failed:
      return Err::EacStateError;
  }
  return Err::EacStateError;
}

SecureMessaging::SecureMessaging(crypto::SessionKeys keys, bool is_initiator)
    : keys_(std::move(keys)),
      send_dir_(is_initiator ? 0 : 1),
      recv_dir_(is_initiator ? 1 : 0) {}

Bytes SecureMessaging::wrap(BytesView inner, crypto::NonceRegistry& nonces) {
  ByteWriter counter;
  counter.u64(send_counter_);
  Bytes counter_bytes = counter.take();
  Bytes nonce = crypto::make_nonce('S', 'M', send_dir_, send_counter_);
  Bytes aad = concat({to_bytes("SM"), BytesView(&send_dir_, 1), counter_bytes});
  crypto::AeadCiphertext ct = crypto::aead_encrypt(keys_.enc, nonce, inner, aad, nonces);
  ++send_counter_;
  ++keys_.counter;
  ByteWriter w;
  w.raw(counter_bytes);
  w.raw(ct.serialize());
  return w.take();
}

Outcome<Bytes> SecureMessaging::unwrap(BytesView payload) {
  if (payload.size() < 8) return Err::SmTamper;
  ByteReader r(payload);
  std::uint64_t claimed = r.u64();
  if (claimed != recv_counter_) return Err::SmReplay;
  auto ct = crypto::AeadCiphertext::parse(payload.subspan(8));
  if (!ct) return Err::SmTamper;
  ByteWriter counter;
  counter.u64(claimed);
  Bytes aad = concat({to_bytes("SM"), BytesView(&recv_dir_, 1), counter.take()});
  auto plain = crypto::aead_decrypt(keys_.enc, *ct, aad);
  if (!plain) return Err::SmTamper;
  ++recv_counter_;
  ++keys_.counter;
  return *plain;
}

}  // namespace meid::eac
