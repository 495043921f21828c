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

#include "meid/world.hpp"

#include <algorithm>

namespace meid {

using actors::kHostId;
using actors::kIssuerId;
using actors::kOffererId;
using actors::kSeId;
using actors::kServerId;
using actors::kSpId;
using actors::kTeeId;
using actors::kTsmId;
using transport::Channel;
using transport::Envelope;

namespace {
constexpr const char* kSeSerial = "se-0001";
constexpr std::uint64_t kRootNotAfter = 1000000;
constexpr std::uint64_t kMidNotAfter = 500000;
constexpr std::uint64_t kLeafNotAfter = 200000;
}  // namespace

const Bytes& issuer_aid() {
  static const Bytes aid{0xA0, 0x00, 0x00, 0x01, 0x51, 0x00, 0x00, 0x00};
  return aid;
}

const Bytes& tsm_aid() {
  static const Bytes aid{0xA0, 0x00, 0x00, 0x01, 0x51, 0x54, 0x53, 0x4D};
  return aid;
}

const Bytes& applet_aid() {
  static const Bytes aid{0xA0, 0x00, 0x00, 0x02, 0x47, 0x10, 0x01};
  return aid;
}

World::World(const scenario::ScenarioConfig& cfg)
    : config(cfg), rng(cfg.seed), se(kSeSerial, &rng, &now, &nonces, &secret_log) {}

std::unique_ptr<World> World::build(const scenario::ScenarioConfig& config) {
  std::unique_ptr<World> w(new World(config));

  // RNG draw order is fixed; reordering anything here changes every
  // transcript byte, which the determinism suite will catch.
  crypto::SymmetricKey isd_enc = crypto::random_symmetric_key(crypto::KeyPurpose::ENC, w->rng);
  crypto::SymmetricKey isd_mac = crypto::random_symmetric_key(crypto::KeyPurpose::MAC, w->rng);

  auto& pk = w->pki;
  pk.cvca_keypair = crypto::generate_keypair(crypto::GroupId::Ed25519, w->rng);
  pk.dv_keypair = crypto::generate_keypair(crypto::GroupId::Ed25519, w->rng);
  pk.terminal_keypair = crypto::generate_keypair(crypto::GroupId::Ed25519, w->rng);
  pk.csca_keypair = crypto::generate_keypair(crypto::GroupId::Ed25519, w->rng);
  pk.ds_keypair = crypto::generate_keypair(crypto::GroupId::Ed25519, w->rng);

  crypto::KeyPair sp_enc = crypto::generate_keypair(crypto::GroupId::X25519, w->rng);
  crypto::KeyPair dap = crypto::generate_keypair(crypto::GroupId::Ed25519, w->rng);
  crypto::KeyPair qr = crypto::generate_keypair(crypto::GroupId::X25519, w->rng);

  pk.cvca = pki::make_root(pk.cvca_keypair, "cvca-de", pki::Role::CVCA, 0, kRootNotAfter);
  pk.csca = pki::make_root(pk.csca_keypair, "csca-de", pki::Role::CSCA, 0, kRootNotAfter);
  pk.dv_cert = pki::issue_certificate(pk.cvca_keypair, pk.cvca.certificate, "dv-1",
                                      crypto::GroupId::Ed25519, pk.dv_keypair.public_part,
                                      pki::Role::DV, 0, kMidNotAfter)
                   .value();
  std::vector<std::string> allowed(config.terminal_attributes_allowed.begin(),
                                   config.terminal_attributes_allowed.end());
  pk.terminal_cert = pki::issue_certificate(pk.dv_keypair, pk.dv_cert, "terminal-eid-server",
                                            crypto::GroupId::Ed25519,
                                            pk.terminal_keypair.public_part,
                                            pki::Role::TERMINAL, 0, kLeafNotAfter, allowed)
                         .value();
  pk.ds_cert = pki::issue_certificate(pk.csca_keypair, pk.csca.certificate, "ds-sp",
                                      crypto::GroupId::Ed25519, pk.ds_keypair.public_part,
                                      pki::Role::DS, 0, kMidNotAfter)
                   .value();
  pk.terminal_chain = pki::CertChain{{pk.cvca.certificate, pk.dv_cert, pk.terminal_cert}};

  // Manufacturing state: only the issuer security domain exists on the SE.
  w->se.install_issuer_domain(issuer_aid(), isd_enc, isd_mac);
  w->issuer.manufactured[kSeSerial] = actors::Issuer::SeRecord{issuer_aid(), isd_enc, isd_mac};

  w->tsm.tsm_aid = tsm_aid();
  w->tsm.applet_aid = applet_aid();
  w->tsm.dap_keypair = dap;
  w->tsm.cvca_cert = pk.cvca.certificate;
  w->tsm.csca_cert = pk.csca.certificate;

  w->sp.enc_keypair = sp_enc;
  w->sp.ds_keypair = pk.ds_keypair;
  w->sp.ds_cert = pk.ds_cert;
  w->sp.csca_cert = pk.csca.certificate;

  Bytes proof = crypto::sha256(
      to_bytes(config.citizen.document_number + ":" + config.card_pin));
  proof.resize(16);
  w->sp.provisioned[config.citizen.document_number] =
      actors::CitizenRecord{config.citizen, proof, qr.public_part};

  w->qr_letter = actors::QrLetter{qr, config.citizen.document_number};

  w->server.terminal_keypair = pk.terminal_keypair;
  w->server.terminal_chain = pk.terminal_chain;
  w->server.terminal_attributes = pk.terminal_cert.attributes_allowed;
  w->server.csca_anchor = pk.csca;

  w->offerer.required_attributes = config.requested_attributes;

  auto add_pair_key = [&w](std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    w->pair_keys_[{std::move(a), std::move(b)}] =
        crypto::random_symmetric_key(crypto::KeyPurpose::ENC, w->rng);
  };
  add_pair_key(kIssuerId, kTsmId);
  add_pair_key(kTsmId, kSpId);
  add_pair_key(kServerId, kOffererId);

  w->host.store.set_path(config.store_path);
  w->se.debug_leak_attributes = config.debug_leak_token;

  // Static part of the secret corpus; dynamic keys are registered where they
  // are generated.
  w->register_secret(to_bytes(config.init_pin));
  w->register_secret(to_bytes(config.card_pin));
  w->register_secret(qr.private_part);
  w->register_secret(pk.cvca_keypair.private_part);
  w->register_secret(pk.dv_keypair.private_part);
  w->register_secret(pk.terminal_keypair.private_part);
  w->register_secret(pk.csca_keypair.private_part);
  w->register_secret(pk.ds_keypair.private_part);
  w->register_secret(sp_enc.private_part);
  w->register_secret(dap.private_part);
  w->register_secret(isd_enc.bytes);
  w->register_secret(isd_mac.bytes);
  for (const auto& [pair, key] : w->pair_keys_) w->register_secret(key.bytes);
  for (const auto& name : EidToken::attribute_names()) {
    w->register_secret(to_bytes(*config.citizen.attribute(name)));
  }
  return w;
}

void World::register_secret(BytesView secret) {
  secret_log.emplace_back(secret.begin(), secret.end());
}

const crypto::SymmetricKey& World::pair_key(const std::string& a, const std::string& b) const {
  auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  auto it = pair_keys_.find(key);
  if (it == pair_keys_.end()) throw Error(Err::RoutingError, "no pair key for " + a + "/" + b);
  return it->second;
}

Outcome<Bytes> World::transfer_oneway(Channel channel, const std::string& from,
                                      const std::string& to, Bytes payload, bool plaintext) {
  Envelope env;
  env.channel = channel;
  env.from = from;
  env.to = to;
  env.plaintext_flag = plaintext;
  env.payload = std::move(payload);
  bus.send(std::move(env));
  while (auto delivered = bus.deliver_next()) {
    if (delivered->to == to) return delivered->payload;
  }
  return Err::Dropped;
}

Bytes World::dispatch_to_actor(const std::string& to, BytesView payload) {
  Bytes copy(payload.begin(), payload.end());
  if (to == kIssuerId) return issuer.handle(*this, copy);
  if (to == kTsmId) return tsm.handle(*this, copy);
  if (to == kSpId) return sp.handle(*this, copy);
  if (to == kServerId) return server.handle(*this, copy);
  if (to == kOffererId) return offerer.handle(*this, copy);
  throw Error(Err::RoutingError, "no handler for actor " + to);
}

Outcome<Bytes> World::transfer(Channel channel, const std::string& from, const std::string& to,
                               Bytes payload, bool plaintext) {
  bool wrap = channel == Channel::SERVER_SIDE;
  Bytes wire = std::move(payload);
  if (wrap) {
    Bytes aad = to_bytes("SS:" + from + ">" + to);
    crypto::AeadCiphertext ct =
        crypto::aead_encrypt(pair_key(from, to), crypto::make_nonce('S', 'V', 0, server_wrap_counter_++),
                             wire, aad, nonces);
    wire = ct.serialize();
  }
  auto arrived = transfer_oneway(channel, from, to, std::move(wire), plaintext);
  if (!arrived) return arrived;

  Bytes request = arrived.value();
  if (wrap) {
    auto ct = crypto::AeadCiphertext::parse(request);
    if (!ct) return Err::ParseError;
    auto plain = crypto::aead_decrypt(pair_key(from, to), *ct, to_bytes("SS:" + from + ">" + to));
    if (!plain) return Err::AuthFailure;
    request = *plain;
  }

  Bytes reply = dispatch_to_actor(to, request);

  Bytes reply_wire = std::move(reply);
  if (wrap) {
    Bytes aad = to_bytes("SS:" + to + ">" + from);
    crypto::AeadCiphertext ct =
        crypto::aead_encrypt(pair_key(from, to), crypto::make_nonce('S', 'V', 0, server_wrap_counter_++),
                             reply_wire, aad, nonces);
    reply_wire = ct.serialize();
  }
  auto back = transfer_oneway(channel, to, from, std::move(reply_wire), false);
  if (!back) return back;
  if (!wrap) return back.value();

  auto ct = crypto::AeadCiphertext::parse(back.value());
  if (!ct) return Err::ParseError;
  auto plain = crypto::aead_decrypt(pair_key(from, to), *ct, to_bytes("SS:" + to + ">" + from));
  if (!plain) return Err::AuthFailure;
  return *plain;
}

Outcome<apdu::ApduResponse> World::tee_apdu(const apdu::ApduCommand& cmd) {
  bool plain = apdu::is_select(cmd);
  auto arrived = transfer_oneway(Channel::TEE_SE, kTeeId, kSeId, cmd.encode(), plain);
  if (!arrived) return Err::Dropped;
  auto as_cmd = apdu::ApduCommand::parse(arrived.value());
  apdu::ApduResponse resp =
      as_cmd ? se.process(*as_cmd) : apdu::status(apdu::kSwWrongData);
  auto back =
      transfer_oneway(Channel::TEE_SE, kSeId, kTeeId, resp.encode(), plain);
  if (!back) return Err::Dropped;
  auto parsed = apdu::ApduResponse::parse(back.value());
  if (!parsed) return Err::ParseError;
  return *parsed;
}

Outcome<apdu::ApduResponse> World::host_apdu(const apdu::ApduCommand& cmd) {
  bool plain = apdu::is_select(cmd);
  auto at_tee = transfer_oneway(Channel::HOST_SE, kHostId, kTeeId, cmd.encode(), plain);
  if (!at_tee) return Err::Dropped;
  auto fwd = apdu::ApduCommand::parse(at_tee.value());
  apdu::ApduResponse resp = apdu::status(apdu::kSwWrongData);
  if (fwd) {
    // Normal-world APDUs reach the SE through the monitor bridge.
    auto inner = tee.forward_apdu(*this, *fwd);
    if (!inner) return inner.error();
    resp = inner.value();
  }
  auto back = transfer_oneway(Channel::HOST_SE, kTeeId, kHostId, resp.encode(), plain);
  if (!back) return Err::Dropped;
  auto parsed = apdu::ApduResponse::parse(back.value());
  if (!parsed) return Err::ParseError;
  return *parsed;
}

namespace {

template <typename SendOne>
Outcome<apdu::ApduResponse> send_chained(std::uint8_t cla, std::uint8_t ins, std::uint8_t p1,
                                         std::uint8_t p2, BytesView data, SendOne&& send_one) {
  auto blocks = apdu::chain_split(cla, ins, p1, p2, data);
  Outcome<apdu::ApduResponse> last = Err::Dropped;
  for (const auto& block : blocks) {
    last = send_one(block);
    if (!last) return last;
    if (!last.value().ok()) return last;  // error status ends the chain
  }
  return last;
}

}  // namespace

Outcome<apdu::ApduResponse> World::host_apdu_large(std::uint8_t cla, std::uint8_t ins,
                                                   std::uint8_t p1, std::uint8_t p2,
                                                   BytesView data) {
  return send_chained(cla, ins, p1, p2, data,
                      [this](const apdu::ApduCommand& c) { return host_apdu(c); });
}

Outcome<apdu::ApduResponse> World::tee_apdu_large(std::uint8_t cla, std::uint8_t ins,
                                                  std::uint8_t p1, std::uint8_t p2,
                                                  BytesView data) {
  return send_chained(cla, ins, p1, p2, data,
                      [this](const apdu::ApduCommand& c) { return tee_apdu(c); });
}

Outcome<Bytes> World::server_side(const std::string& from, const std::string& to,
                                  Bytes message) {
  return transfer(Channel::SERVER_SIDE, from, to, std::move(message), false);
}

}  // namespace meid
