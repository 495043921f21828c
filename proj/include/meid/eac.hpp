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

#include <optional>
#include <string>

#include "meid/bytes.hpp"
#include "meid/crypto.hpp"
#include "meid/errors.hpp"
#include "meid/pki.hpp"

namespace meid::eac {

// Terminal Authentication: the initiator presents its CVCA-rooted chain and
// signs the responder's challenge together with a hash commitment to the
// ephemeral agreement key it will use in Chip Authentication. That hash binds
// the two subprotocols. Chip Authentication: the responder's static certified
// key against the committed ephemeral one; both sides derive session keys
// from the shared secret and the transcript hash, and confirm them with MACs
// before any payload flows.

enum class MsgType : std::uint8_t {
  TaRequest = 1,   // terminal chain
  TaChallenge = 2, // 8-byte chip challenge
  TaResponse = 3,  // commitment || signature
  TaOk = 4,
  CaRequest = 5,   // ephemeral public key
  CaResponse = 6,  // chip chain || responder key-confirmation MAC
  CaConfirm = 7,   // initiator key-confirmation MAC
  CaOk = 8,
  Error = 0x7F,    // u16 error code
};

struct Message {
  MsgType type = MsgType::Error;
  Bytes body;

  Bytes encode() const;
  static std::optional<Message> decode(BytesView b);
};

Message error_message(Err code);
std::optional<Err> as_error(const Message& m);

/// Chip-side state machine, one per EAC run. Owns copies of the chip
/// material so it stays valid while applet storage moves around.
class Responder {
 public:
  Responder(pki::TrustAnchor cvca_anchor, crypto::KeyPair chip_keypair,
            pki::CertChain chip_chain, const std::uint64_t* clock, Rng* rng,
            std::vector<Bytes>* secret_log = nullptr);

  /// Feeds one initiator message; returns the reply. A verification failure
  /// produces an Error message and parks the machine in a terminal state.
  Message handle(const Message& msg);

  bool ta_done() const { return phase_ >= Phase::TaAccepted; }
  bool ca_done() const { return phase_ == Phase::CaAccepted; }
  const std::optional<pki::VerifiedLeaf>& terminal_leaf() const { return terminal_leaf_; }
  const std::optional<crypto::SessionKeys>& session_keys() const { return session_keys_; }

 private:
  enum class Phase { AwaitTaRequest, AwaitTaResponse, TaAccepted, AwaitCaConfirm, CaAccepted,
                     Failed };
  Message fail(Err code);

  pki::TrustAnchor cvca_anchor_;
  crypto::KeyPair chip_keypair_;
  pki::CertChain chip_chain_;
  const std::uint64_t* clock_;
  Rng* rng_;
  std::vector<Bytes>* secret_log_;

  Phase phase_ = Phase::AwaitTaRequest;
  Bytes challenge_;
  Bytes commitment_;
  Bytes transcript_hash_;
  std::optional<pki::VerifiedLeaf> terminal_leaf_;
  std::optional<crypto::SessionKeys> session_keys_;
};

/// Terminal-side state machine (eID server).
class Initiator {
 public:
  Initiator(const crypto::KeyPair* terminal_keypair, const pki::CertChain* terminal_chain,
            const pki::TrustAnchor* csca_anchor, const std::uint64_t* clock, Rng* rng,
            std::vector<Bytes>* secret_log = nullptr);

  /// First message of the run (TaRequest).
  Message start();
  /// Feeds the responder's reply; returns the next message to send, or
  /// nothing when the handshake has completed (after receiving CaOk).
  Outcome<std::optional<Message>> handle(const Message& msg);

  bool done() const { return phase_ == Phase::Done; }
  const std::optional<crypto::SessionKeys>& session_keys() const { return session_keys_; }
  const std::optional<pki::VerifiedLeaf>& chip_leaf() const { return chip_leaf_; }

  /// Test hook: replace the ephemeral key after TA committed to it.
  void corrupt_ephemeral_for_test(const crypto::KeyPair& kp) { ephemeral_ = kp; }

 private:
  enum class Phase { Idle, AwaitChallenge, AwaitTaOk, AwaitCaResponse, AwaitCaOk, Done, Failed };

  const crypto::KeyPair* terminal_keypair_;
  const pki::CertChain* terminal_chain_;
  const pki::TrustAnchor* csca_anchor_;
  const std::uint64_t* clock_;
  Rng* rng_;
  std::vector<Bytes>* secret_log_;

  Phase phase_ = Phase::Idle;
  Bytes challenge_;
  crypto::KeyPair ephemeral_;
  Bytes commitment_;
  Bytes transcript_hash_;
  std::optional<crypto::SessionKeys> session_keys_;
  std::optional<pki::VerifiedLeaf> chip_leaf_;
};

/// Post-handshake secure messaging: AEAD over (counter || inner bytes) with
/// direction-separated nonces; a visible counter prefix makes replays
/// distinguishable from tampering.
class SecureMessaging {
 public:
  SecureMessaging(crypto::SessionKeys keys, bool is_initiator);

  Bytes wrap(BytesView inner, crypto::NonceRegistry& nonces);
  Outcome<Bytes> unwrap(BytesView payload);

  std::uint64_t send_counter() const { return send_counter_; }
  std::uint64_t recv_counter() const { return recv_counter_; }

 private:
  crypto::SessionKeys keys_;
  std::uint8_t send_dir_;
  std::uint8_t recv_dir_;
  std::uint64_t send_counter_ = 0;
  std::uint64_t recv_counter_ = 0;
};

}  // namespace meid::eac
