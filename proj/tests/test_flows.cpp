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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "meid/tee.hpp"
#include "meid/world.hpp"
#include "test_util.hpp"

using namespace meid;
using meid::testutil::test_config;

namespace {

host::TcToken fetch_tc(World& w) {
  auto tc = w.host.handle_tc_token_url(w, "eid://offerer-1");
  REQUIRE(tc.ok());
  return tc.value();
}

}  // namespace

TEST_CASE("initialization completes all four phases on the default world") {
  auto w = World::build(test_config(7));
  auto report = w->host.run_initialization(*w);
  REQUIRE(report.success);
  REQUIRE(report.steps.size() == 4);
  for (const auto& step : report.steps) CHECK(step.status == "ok");

  // Post-state: TSM domain with rotated keys, applet PERSONALIZED, encrypted
  // token in the untrusted store, registry size 1.
  const se::SecurityDomain* domain = w->se.find_domain(tsm_aid());
  REQUIRE(domain != nullptr);
  REQUIRE(w->tsm.current_enc.has_value());
  CHECK(domain->s_enc == *w->tsm.current_enc);
  CHECK(domain->s_mac == *w->tsm.current_mac);
  // rotated away from what the issuer handed out
  REQUIRE(w->issuer.issued_keys.size() == 1);
  CHECK_FALSE(domain->s_enc == w->issuer.issued_keys.begin()->second.first);

  const se::EidApplet* applet = w->se.find_applet(applet_aid());
  REQUIRE(applet != nullptr);
  CHECK(applet->state == se::AppletState::PERSONALIZED);
  CHECK(w->host.store.has(host::HostApp::kTokenBlobKey));
  CHECK(w->sp.registry.size() == 1);
}

TEST_CASE("initialization aborts at step 1 when TEE or SE is unavailable") {
  auto cfg = test_config(8);
  cfg.tee_available = false;
  auto w = World::build(cfg);
  auto report = w->host.run_initialization(*w);
  CHECK_FALSE(report.success);
  CHECK(*report.abort_step == 1);
  CHECK(report.abort_cause == Err::TeeUnavailable);

  cfg.tee_available = true;
  cfg.se_available = false;
  auto w2 = World::build(cfg);
  auto report2 = w2->host.run_initialization(*w2);
  CHECK(*report2.abort_step == 1);
  CHECK(report2.abort_cause == Err::SeUnavailable);
}

TEST_CASE("re-running initialization trips the clone-prevention registry") {
  auto w = World::build(test_config(9));
  REQUIRE(w->host.run_initialization(*w).success);
  auto second = w->host.run_initialization(*w);
  CHECK_FALSE(second.success);
  CHECK(*second.abort_step == 4);
  CHECK(second.abort_cause == Err::AlreadyRegistered);
  CHECK(w->sp.registry.size() == 1);
  // phases 2 and 3 resumed over the existing install
  CHECK(second.steps[1].status == "skipped");
  CHECK(second.steps[2].status == "skipped");
}

TEST_CASE("captured-document mismatches abort personalization") {
  SUBCASE("altered date of birth") {
    auto cfg = test_config(10);
    cfg.captured = scenario::CapturedVariant::WrongDob;
    auto w = World::build(cfg);
    auto report = w->host.run_initialization(*w);
    CHECK(*report.abort_step == 4);
    CHECK(report.abort_cause == Err::ValidationFailed);
    CHECK(w->sp.registry.size() == 0);
  }
  SUBCASE("unknown document number") {
    auto cfg = test_config(11);
    cfg.captured = scenario::CapturedVariant::Unregistered;
    auto w = World::build(cfg);
    auto report = w->host.run_initialization(*w);
    CHECK(*report.abort_step == 4);
    CHECK(report.abort_cause == Err::ValidationFailed);
  }
}

TEST_CASE("tc token fetch: lookup, freshness, unknown offerer") {
  auto w = World::build(test_config(12));
  auto tc1 = w->host.handle_tc_token_url(*w, "eid://offerer-1");
  REQUIRE(tc1.ok());
  CHECK(tc1.value().required_attributes == w->config.requested_attributes);
  CHECK(tc1.value().eid_server_address == "eid-server");

  auto tc2 = w->host.handle_tc_token_url(*w, "eid://offerer-1");
  REQUIRE(tc2.ok());
  CHECK(tc1.value().offerer_session_id != tc2.value().offerer_session_id);

  CHECK(w->host.handle_tc_token_url(*w, "eid://nobody").error() == Err::UnknownOfferer);
  CHECK(w->host.handle_tc_token_url(*w, "https://x").error() == Err::UnknownOfferer);
}

TEST_CASE("authentication delivers exactly the consented attributes and locks the SE") {
  auto cfg = test_config(13);
  cfg.consent_choice = std::set<std::string>{"given_names", "date_of_birth"};
  auto w = World::build(cfg);
  REQUIRE(w->host.run_initialization(*w).success);
  host::TcToken tc = fetch_tc(*w);
  auto report = w->host.run_authentication(*w, tc);
  REQUIRE(report.success);
  CHECK(report.ta_ok);
  CHECK(report.ca_ok);
  CHECK(report.steps.size() == 8);

  // offerer got exactly the approved set with the citizen's values
  auto session = w->offerer.sessions.at(tc.offerer_session_id);
  REQUIRE(session.has_value());
  REQUIRE(session->size() == 2);
  CHECK(session->at("given_names") == "ERIKA");
  CHECK(session->at("date_of_birth") == "1984-08-12");

  const se::EidApplet* applet = w->se.find_applet(applet_aid());
  CHECK_FALSE(applet->access_unlocked);
  CHECK_FALSE(applet->transient_token.has_value());
}

TEST_CASE("authentication without prior initialization aborts at step 1") {
  auto w = World::build(test_config(14));
  host::TcToken tc;
  tc.required_attributes = {"given_names"};
  tc.eid_server_address = "eid-server";
  tc.offerer_session_id = Bytes{1, 2, 3, 4};
  auto report = w->host.run_authentication(*w, tc);
  CHECK_FALSE(report.success);
  CHECK(*report.abort_step == 1);
  CHECK(report.abort_cause == Err::NotInitialized);
}

TEST_CASE("three wrong PINs abort authentication and block the applet") {
  auto cfg = test_config(15);
  cfg.auth_pin_attempts = {"000000", "111111", "222222"};
  auto w = World::build(cfg);
  REQUIRE(w->host.run_initialization(*w).success);
  auto report = w->host.run_authentication(*w, fetch_tc(*w));
  CHECK_FALSE(report.success);
  CHECK(*report.abort_step == 2);
  CHECK(report.abort_cause == Err::PinBlocked);
  CHECK(w->se.find_applet(applet_aid())->state == se::AppletState::BLOCKED);
}

TEST_CASE("wrong, wrong, correct unlocks and resets the counter") {
  auto cfg = test_config(16);
  cfg.auth_pin_attempts = {"000000", "111111", "123456"};
  auto w = World::build(cfg);
  REQUIRE(w->host.run_initialization(*w).success);
  auto report = w->host.run_authentication(*w, fetch_tc(*w));
  CHECK(report.success);
  CHECK(w->se.find_applet(applet_aid())->pin.retry_counter == 3);
}

TEST_CASE("a tampered stored blob aborts at step 5") {
  auto cfg = test_config(17);
  cfg.tamper_stored_blob = true;
  auto w = World::build(cfg);
  REQUIRE(w->host.run_initialization(*w).success);
  auto report = w->host.run_authentication(*w, fetch_tc(*w));
  CHECK_FALSE(report.success);
  CHECK(*report.abort_step == 5);
  CHECK(report.abort_cause == Err::BlobTamper);
}

TEST_CASE("a request beyond the terminal certificate is refused at session start") {
  auto cfg = test_config(18);
  cfg.requested_attributes = {"given_names", "expiry"};  // expiry not allowed
  auto w = World::build(cfg);
  REQUIRE(w->host.run_initialization(*w).success);
  auto report = w->host.run_authentication(*w, fetch_tc(*w));
  CHECK_FALSE(report.success);
  CHECK(*report.abort_step == 1);
  CHECK(report.abort_cause == Err::RequestExceedsCertificate);
}

TEST_CASE("expired terminal certificate fails TA") {
  auto cfg = test_config(19);
  auto w = World::build(cfg);
  REQUIRE(w->host.run_initialization(*w).success);
  w->now = 300000;  // past the terminal certificate's validity
  auto report = w->host.run_authentication(*w, fetch_tc(*w));
  CHECK_FALSE(report.success);
  CHECK(*report.abort_step == 3);
  CHECK(report.abort_cause == Err::TaChainInvalid);
}

TEST_CASE("untrusted store: roundtrip, missing key, ciphertext only") {
  auto w = World::build(test_config(20));
  REQUIRE(w->host.run_initialization(*w).success);

  auto blob = w->host.store.load_blob(host::HostApp::kTokenBlobKey);
  REQUIRE(blob.ok());
  CHECK(w->host.store.load_blob("nope").error() == Err::MissingKey);

  // The adversary reads the persisted file directly: ciphertext only.
  Bytes file = w->host.store.file_bytes();
  CHECK(file.size() > blob.value().size());
  for (const auto& name : EidToken::attribute_names()) {
    std::string value = *w->config.citizen.attribute(name);
    if (value.size() < 4) continue;
    CHECK_FALSE(contains_subsequence(file, to_bytes(value)));
  }
  for (const auto& secret : w->secret_corpus()) {
    if (secret.size() < 4) continue;
    CHECK_FALSE(contains_subsequence(file, secret));
  }
}

TEST_CASE("consent intersection rules") {
  std::set<std::string> allowed = {"given_names", "family_name", "date_of_birth"};
  auto c1 = tee::consent_intersect({"given_names", "date_of_birth"}, {"given_names"}, allowed);
  REQUIRE(c1.ok());
  CHECK(c1.value().approved == std::set<std::string>{"given_names"});

  auto c2 = tee::consent_intersect({"given_names"}, {"given_names"}, allowed);
  CHECK(c2.value().approved == c2.value().requested);

  auto c3 = tee::consent_intersect({"expiry"}, {"expiry"}, allowed);
  CHECK(c3.error() == Err::RequestExceedsCertificate);

  auto c4 = tee::consent_intersect({"given_names"}, {}, allowed);
  CHECK(c4.value().approved.empty());
}

TEST_CASE("TEE routing: secure input may not originate in the normal world") {
  auto w = World::build(test_config(21));
  tee::MonitorCall call;
  call.origin = tee::Origin::NORMAL_WORLD;
  call.secure_input = true;
  call.request.ins = apdu::kInsVerifyPin;
  CHECK(w->tee.monitor_call(*w, call).error() == Err::RoutingError);
  call.origin = tee::Origin::SECURE_WORLD;
  CHECK(w->tee.monitor_call(*w, call).ok());  // routed; SE answers with a status word
}

TEST_CASE("malformed QR payloads are rejected") {
  CHECK(tee::decode_qr_payload("QR1:zz").error() == Err::MalformedQr);
  CHECK(tee::decode_qr_payload("QR2:00").error() == Err::MalformedQr);
  CHECK(tee::decode_qr_payload("QR1:" + std::string(62, '0')).error() == Err::MalformedQr);
  Bytes priv(32, 0x11);
  auto round = tee::decode_qr_payload(tee::encode_qr_payload(priv));
  REQUIRE(round.ok());
  CHECK(round.value() == priv);
}

TEST_CASE("PIN digits and QR private key appear only on the TEE channel") {
  auto w = World::build(test_config(22));
  REQUIRE(w->host.run_initialization(*w).success);
  REQUIRE(w->host.run_authentication(*w, fetch_tc(*w)).success);

  Bytes pin = to_bytes(w->config.init_pin);
  const Bytes& qr_priv = w->qr_letter.qr_keypair.private_part;
  bool seen_on_tee = false;
  for (const auto& rec : w->bus.transcript().records()) {
    bool has_secret = contains_subsequence(rec.payload, pin) ||
                      contains_subsequence(rec.payload, qr_priv);
    if (rec.channel == transport::Channel::TEE_SE) {
      seen_on_tee = seen_on_tee || has_secret;
    } else {
      CHECK_FALSE(has_secret);
    }
  }
  CHECK(seen_on_tee);  // the monitor channel does carry them
}

TEST_CASE("every SELECT envelope is plaintext-flagged; nothing else is") {
  auto w = World::build(test_config(23));
  REQUIRE(w->host.run_initialization(*w).success);
  REQUIRE(w->host.run_authentication(*w, fetch_tc(*w)).success);
  for (const auto& rec : w->bus.transcript().records()) {
    auto cmd = apdu::ApduCommand::parse(rec.payload);
    bool is_select_cmd = cmd && apdu::is_select(*cmd) && !cmd->data.empty() &&
                         (rec.channel == transport::Channel::HOST_SE ||
                          rec.channel == transport::Channel::TEE_SE);
    if (is_select_cmd) CHECK(rec.plaintext_flag);
  }
}

TEST_CASE("chip private key appears in no envelope in plaintext") {
  auto w = World::build(test_config(24));
  REQUIRE(w->host.run_initialization(*w).success);
  REQUIRE(w->host.run_authentication(*w, fetch_tc(*w)).success);
  const se::EidApplet* applet = w->se.find_applet(applet_aid());
  const Bytes& chip_priv = applet->chip_ca_keypair.private_part;
  REQUIRE(chip_priv.size() == 32);
  for (const auto& rec : w->bus.transcript().records()) {
    CHECK_FALSE(contains_subsequence(rec.payload, chip_priv));
  }
}

TEST_CASE("dropped traffic aborts the flow instead of hanging") {
  auto cfg = test_config(25);
  auto w = World::build(cfg);
  transport::InterceptorPolicy drop;
  drop.channel = transport::Channel::HOST_ISSUER;
  drop.action = transport::InterceptAction::Drop;
  w->bus.add_interceptor(drop);
  auto report = w->host.run_initialization(*w);
  CHECK_FALSE(report.success);
  CHECK(*report.abort_step == 2);
  CHECK(report.abort_cause == Err::Dropped);
}

TEST_CASE("issuer refuses provisioning for an unknown secure element") {
  auto w = World::build(test_config(26));
  ByteWriter body;
  body.u32(1);
  body.str("se-unknown");
  body.bytes(tsm_aid());
  body.bytes(w->tsm.dap_keypair.public_part);
  actors::Msg forward{actors::MsgTag::SsdForward, body.take()};
  auto reply = actors::Msg::decode(w->issuer.handle(*w, forward.encode()));
  REQUIRE(reply.has_value());
  REQUIRE(actors::msg_error(*reply).has_value());
  CHECK(*actors::msg_error(*reply) == Err::UnknownSecureElement);
}

TEST_CASE("offerer rejects attribute delivery for an unknown session") {
  auto w = World::build(test_config(27));
  ByteWriter body;
  body.bytes(Bytes{9, 9, 9, 9});
  body.bytes(encode_attribute_map({{"given_names", "X"}}));
  actors::Msg deliver{actors::MsgTag::DeliverAttributes, body.take()};
  auto reply = actors::Msg::decode(w->offerer.handle(*w, deliver.encode()));
  REQUIRE(reply.has_value());
  REQUIRE(actors::msg_error(*reply).has_value());
  CHECK(*actors::msg_error(*reply) == Err::SessionUnknown);
}

TEST_CASE("a recorded install command replayed into a second world fails") {
  // Record every INSTALL apdu that crossed the wire in world A.
  auto a = World::build(test_config(28));
  REQUIRE(a->host.run_initialization(*a).success);
  std::vector<apdu::ApduCommand> installs;
  for (const auto& rec : a->bus.transcript().records()) {
    if (rec.channel != transport::Channel::TEE_SE) continue;
    if (rec.event != transport::EventKind::Delivered) continue;
    auto cmd = apdu::ApduCommand::parse(rec.payload);
    if (cmd && cmd->ins == apdu::kInsInstall) installs.push_back(*cmd);
  }
  REQUIRE_FALSE(installs.empty());

  // World B: different seed, so different static keys, challenges and session
  // keys. The recorded ciphertext cannot authenticate there.
  auto b = World::build(test_config(281));
  apdu::ApduCommand select;
  select.cla = apdu::kClaIso;
  select.ins = apdu::kInsSelect;
  select.p1 = 0x04;
  select.data = issuer_aid();
  REQUIRE(b->host_apdu(select).value().ok());
  se::HostChannel ch(b->issuer.manufactured.at("se-0001").s_enc,
                     b->issuer.manufactured.at("se-0001").s_mac);
  REQUIRE(ch.absorb_init_response(b->host_apdu(ch.initialize_update(b->rng)).value()));
  REQUIRE(b->host_apdu(ch.external_authenticate()).value().ok());
  apdu::ApduResponse last;
  for (const auto& cmd : installs) {
    auto resp = b->host_apdu(cmd);
    REQUIRE(resp.ok());
    last = resp.value();
    if (!last.ok()) break;
  }
  CHECK(last.sw == apdu::kSwWrongData);
  CHECK(b->se.find_domain(tsm_aid()) == nullptr);
}

TEST_CASE("store file on disk matches the documented layout") {
  auto w = World::build(test_config(29));
  REQUIRE(w->host.run_initialization(*w).success);
  std::ifstream in(w->host.store.path(), std::ios::binary);
  REQUIRE(in.good());
  Bytes on_disk((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(on_disk == w->host.store.file_bytes());
  CHECK(std::equal(on_disk.begin(), on_disk.begin() + 8, to_bytes("MEIDSTOR").begin()));
  std::filesystem::remove(w->host.store.path());
}

TEST_CASE("card challenges are unique across a full scenario") {
  auto w = World::build(test_config(30));
  REQUIRE(w->host.run_initialization(*w).success);
  REQUIRE(w->host.run_authentication(*w, fetch_tc(*w)).success);
  // Every INITIALIZE UPDATE response carries challenge(8) || cryptogram(16);
  // no other SE response of this scenario is 24 bytes long.
  std::set<Bytes> card_challenges;
  std::size_t responses = 0;
  for (const auto& rec : w->bus.transcript().records()) {
    if (rec.event != transport::EventKind::Sent) continue;
    if (rec.channel != transport::Channel::TEE_SE || rec.from != "se") continue;
    auto resp = apdu::ApduResponse::parse(rec.payload);
    if (resp && resp->ok() && resp->data.size() == 24) {
      card_challenges.insert(Bytes(resp->data.begin(), resp->data.begin() + 8));
      ++responses;
    }
  }
  CHECK(responses == 3);  // issuer install, TSM rotate, TSM deploy
  CHECK(card_challenges.size() == responses);
}

TEST_CASE("a passive observer does not change the traffic") {
  auto plain = World::build(test_config(31));
  REQUIRE(plain->host.run_initialization(*plain).success);
  REQUIRE(plain->host.run_authentication(*plain, fetch_tc(*plain)).success);

  auto observed = World::build(test_config(31));
  transport::KnowledgeSet knowledge;
  transport::InterceptorPolicy observe;
  observe.channel = transport::Channel::HOST_SE;
  observe.action = transport::InterceptAction::Observe;
  observe.knowledge = &knowledge;
  observed->bus.add_interceptor(observe);
  REQUIRE(observed->host.run_initialization(*observed).success);
  REQUIRE(observed->host.run_authentication(*observed, fetch_tc(*observed)).success);

  CHECK(plain->bus.transcript().text() == observed->bus.transcript().text());
  CHECK_FALSE(knowledge.observed_aids.empty());
}
