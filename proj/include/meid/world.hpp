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

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "meid/actors.hpp"
#include "meid/apdu.hpp"
#include "meid/crypto.hpp"
#include "meid/host_app.hpp"
#include "meid/pki.hpp"
#include "meid/rng.hpp"
#include "meid/scenario.hpp"
#include "meid/secure_element.hpp"
#include "meid/tee.hpp"
#include "meid/transport.hpp"

namespace meid {

// Well-known application identifiers.
const Bytes& issuer_aid();
const Bytes& tsm_aid();
const Bytes& applet_aid();

struct PkiMaterial {
  crypto::KeyPair cvca_keypair;
  crypto::KeyPair dv_keypair;
  crypto::KeyPair terminal_keypair;
  crypto::KeyPair csca_keypair;
  crypto::KeyPair ds_keypair;
  pki::TrustAnchor cvca;
  pki::TrustAnchor csca;
  pki::Certificate dv_cert;
  pki::Certificate terminal_cert;
  pki::Certificate ds_cert;
  pki::CertChain terminal_chain;
};

/// One scenario world: the single mutation point is the sequential message
/// flow through the bus. Heap-allocated and pinned so actors may hold
/// pointers into each other's long-lived state.
struct World {
  scenario::ScenarioConfig config;
  Rng rng;
  std::uint64_t now = 1000;  // simulated clock ticks
  crypto::NonceRegistry nonces;
  transport::Bus bus;
  PkiMaterial pki;

  se::SecureElement se;
  tee::Tee tee;
  host::HostApp host;

  actors::Issuer issuer;
  actors::Tsm tsm;
  actors::ServiceProvider sp;
  actors::EidServer server;
  actors::Offerer offerer;

  actors::QrLetter qr_letter;

  /// PIN digits, private parts, symmetric keys and attribute plaintexts known
  /// to this world; the confidentiality scans use it as the secret corpus.
  std::vector<Bytes> secret_log;

  World(const World&) = delete;
  World& operator=(const World&) = delete;

  static std::unique_ptr<World> build(const scenario::ScenarioConfig& config);

  /// Sends one envelope and pumps the bus until it reaches `to`; returns the
  /// payload as delivered (post-interception) or Dropped.
  Outcome<Bytes> transfer_oneway(transport::Channel channel, const std::string& from,
                                 const std::string& to, Bytes payload, bool plaintext = false);

  /// Request/response exchange: delivers to the target actor's handler and
  /// routes the reply back. SERVER_SIDE payloads are pair-key wrapped.
  Outcome<Bytes> transfer(transport::Channel channel, const std::string& from,
                          const std::string& to, Bytes payload, bool plaintext = false);

  /// Host-originated APDU: host -> tee (HOST_SE), tee -> se (TEE_SE), and the
  /// response back through both legs. SELECT traffic is plaintext-flagged.
  Outcome<apdu::ApduResponse> host_apdu(const apdu::ApduCommand& cmd);
  /// Splits an oversized payload into a command chain and sends it.
  Outcome<apdu::ApduResponse> host_apdu_large(std::uint8_t cla, std::uint8_t ins,
                                              std::uint8_t p1, std::uint8_t p2, BytesView data);
  /// TEE-originated APDU (TEE_SE leg only).
  Outcome<apdu::ApduResponse> tee_apdu(const apdu::ApduCommand& cmd);
  Outcome<apdu::ApduResponse> tee_apdu_large(std::uint8_t cla, std::uint8_t ins,
                                             std::uint8_t p1, std::uint8_t p2, BytesView data);

  /// Exchange between two remote actors over the pre-authenticated link.
  Outcome<Bytes> server_side(const std::string& from, const std::string& to, Bytes message);

  void register_secret(BytesView secret);
  const std::vector<Bytes>& secret_corpus() const { return secret_log; }

  const crypto::SymmetricKey& pair_key(const std::string& a, const std::string& b) const;

 private:
  explicit World(const scenario::ScenarioConfig& cfg);
  Bytes dispatch_to_actor(const std::string& to, BytesView payload);

  std::map<std::pair<std::string, std::string>, crypto::SymmetricKey> pair_keys_;
  std::uint64_t server_wrap_counter_ = 0;
};

}  // namespace meid
