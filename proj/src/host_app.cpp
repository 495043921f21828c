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

#include "meid/host_app.hpp"

#include <fstream>

#include "meid/world.hpp"

namespace meid::host {

using actors::kHostId;
using actors::kIssuerId;
using actors::kOffererId;
using actors::kServerId;
using actors::kTsmId;
using actors::Msg;
using actors::MsgTag;
using transport::Channel;

Bytes TcToken::encode() const {
  ByteWriter w;
  w.raw(encode_attribute_set(required_attributes));
  w.str(eid_server_address);
  w.bytes(offerer_session_id);
  return w.take();
}

std::optional<TcToken> TcToken::decode(BytesView b) {
  ByteReader r(b);
  auto required = decode_attribute_set(r);
  if (!required || required->empty()) return std::nullopt;  // must name something
  TcToken tc;
  tc.required_attributes = std::move(*required);
  tc.eid_server_address = r.str();
  tc.offerer_session_id = r.bytes();
  if (!r.done()) return std::nullopt;
  return tc;
}

void UntrustedStore::store_blob(const std::string& key, Bytes value) {
  kv_[key] = std::move(value);
  persist();
}

Outcome<Bytes> UntrustedStore::load_blob(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return Err::MissingKey;
  return it->second;
}

Bytes UntrustedStore::file_bytes() const {
  ByteWriter w;
  w.raw(to_bytes("MEIDSTOR"));
  w.u32(static_cast<std::uint32_t>(kv_.size()));
  for (const auto& [key, value] : kv_) {
    w.str(key);
    w.bytes(value);
  }
  return w.take();
}

void UntrustedStore::persist() const {
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  Bytes data = file_bytes();
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
}

namespace {

struct FlowError {
  Err cause = Err::None;
};

apdu::ApduCommand select_command(const Bytes& aid) {
  apdu::ApduCommand cmd;
  cmd.cla = apdu::kClaIso;
  cmd.ins = apdu::kInsSelect;
  cmd.p1 = 0x04;
  cmd.data = aid;
  return cmd;
}

Outcome<Msg> exchange(World& world, Channel channel, const std::string& to, const Msg& msg) {
  auto reply = world.transfer(channel, kHostId, to, msg.encode());
  if (!reply) return reply.error();
  auto parsed = Msg::decode(reply.value());
  if (!parsed) return Err::ParseError;
  return *parsed;
}

/// Runs one remote-driven APDU relay loop until the remote reports a final
/// message; returns that final message. `result_tag` carries the ticket or
/// session id prefix for ApduResult messages.
Outcome<Msg> relay_loop(World& world, Channel channel, const std::string& remote,
                        const Msg& first_request, MsgTag result_tag, const Bytes& id_prefix) {
  auto step = exchange(world, channel, remote, first_request);
  while (true) {
    if (!step) return step;
    const Msg& m = step.value();
    if (m.tag != MsgTag::ApduForSe) return m;
    auto cmd = apdu::ApduCommand::parse(m.body);
    if (!cmd) return Err::ParseError;
    auto resp = world.host_apdu(*cmd);
    if (!resp) return resp.error();
    ByteWriter w;
    w.raw(id_prefix);
    w.bytes(resp.value().encode());
    step = exchange(world, channel, remote, Msg{result_tag, w.take()});
  }
}

Bytes ticket_bytes(std::uint32_t ticket) {
  ByteWriter w;
  w.u32(ticket);
  return w.take();
}

}  // namespace

InitReport HostApp::run_initialization(World& world) {
  InitReport report;
  auto fail = [&](int step, const std::string& name, Err cause) {
    report.steps.push_back({step, name, err_name(cause)});
    report.abort_step = step;
    report.abort_cause = cause;
    report.success = false;
    return report;
  };
  auto pass = [&](int step, const std::string& name, bool skipped = false) {
    report.steps.push_back({step, name, skipped ? "skipped" : "ok"});
  };

  // 1) Initial setup: availability check, trustlet installation.
  if (!world.config.tee_available) return fail(1, "initial-setup", Err::TeeUnavailable);
  if (!world.config.se_available) return fail(1, "initial-setup", Err::SeUnavailable);
  world.tee.trustlet_installed = true;
  pass(1, "initial-setup");

  // 2) Install the TSM's security domain, then the TSM rotates its keys.
  bool ssd_present = false;
  {
    auto probe = world.host_apdu(select_command(tsm_aid()));
    if (!probe) return fail(2, "install-tsm-ssd", probe.error());
    ssd_present = probe.value().ok();
  }
  if (ssd_present) {
    pass(2, "install-tsm-ssd", /*skipped=*/true);
  } else {
    ByteWriter req;
    req.str(world.se.se_id());
    auto ticket_msg =
        exchange(world, Channel::HOST_TSM, kTsmId, Msg{MsgTag::SsdRequest, req.take()});
    if (!ticket_msg) return fail(2, "install-tsm-ssd", ticket_msg.error());
    if (auto err = actors::msg_error(ticket_msg.value()))
      return fail(2, "install-tsm-ssd", *err);
    ByteReader tr(ticket_msg.value().body);
    std::uint32_t ticket = tr.u32();
    if (!tr.done()) return fail(2, "install-tsm-ssd", Err::ParseError);

    auto done = relay_loop(world, Channel::HOST_ISSUER, kIssuerId,
                           Msg{MsgTag::ProvisionPoll, ticket_bytes(ticket)},
                           MsgTag::ProvisionApduResult, ticket_bytes(ticket));
    if (!done) return fail(2, "install-tsm-ssd", done.error());
    if (done.value().tag != MsgTag::ProvisionDone || done.value().body != Bytes{1})
      return fail(2, "install-tsm-ssd", Err::NoSuchDomain);

    // TSM connects to its new domain and sets its own keys.
    auto rotated = relay_loop(world, Channel::HOST_TSM, kTsmId,
                              Msg{MsgTag::TsmPoll, ticket_bytes(ticket)},
                              MsgTag::TsmApduResult, ticket_bytes(ticket));
    if (!rotated) return fail(2, "install-tsm-ssd", rotated.error());
    if (rotated.value().tag != MsgTag::TsmStageDone ||
        rotated.value().body != Bytes{1, 1}) {
      return fail(2, "install-tsm-ssd", Err::NoSuchDomain);
    }
    pass(2, "install-tsm-ssd");
    pending_ticket_ = ticket;
  }

  // 3) Install the eID applet (DAP-verified).
  bool applet_present = false;
  {
    auto probe = world.host_apdu(select_command(applet_aid()));
    if (!probe) return fail(3, "install-applet", probe.error());
    applet_present = probe.value().ok();
  }
  if (applet_present) {
    pass(3, "install-applet", /*skipped=*/true);
  } else {
    auto deployed = relay_loop(world, Channel::HOST_TSM, kTsmId,
                               Msg{MsgTag::TsmDeploy, ticket_bytes(pending_ticket_)},
                               MsgTag::TsmApduResult, ticket_bytes(pending_ticket_));
    if (!deployed) return fail(3, "install-applet", deployed.error());
    if (deployed.value().tag != MsgTag::TsmStageDone ||
        deployed.value().body != Bytes{2, 1}) {
      return fail(3, "install-applet", Err::DapRejected);
    }
    pass(3, "install-applet");
  }

  // 4) Personalize: capture, SP validation, token package, QR + PIN in TEE.
  CapturedDocument captured;
  captured.fields = world.config.citizen;
  Bytes proof = crypto::sha256(
      to_bytes(world.config.citizen.document_number + ":" + world.config.card_pin));
  proof.resize(16);
  captured.card_pin_proof = proof;
  switch (world.config.captured) {
    case scenario::CapturedVariant::Valid: break;
    case scenario::CapturedVariant::WrongDob:
      captured.fields.date_of_birth = "1900-01-01";
      break;
    case scenario::CapturedVariant::Unregistered:
      captured.fields.document_number = "UNKNOWN001";
      break;
  }
  Bytes sealed = crypto::hybrid_seal(world.sp.enc_keypair.public_part, captured.encode(),
                                     to_bytes("sp-upload"), world.rng, world.nonces);
  ByteWriter preq;
  preq.bytes(sealed);
  auto package_msg = exchange(world, Channel::HOST_TSM, kTsmId,
                              Msg{MsgTag::PersonalizeForward, preq.take()});
  if (!package_msg) return fail(4, "personalize", package_msg.error());
  if (auto err = actors::msg_error(package_msg.value())) return fail(4, "personalize", *err);
  if (package_msg.value().tag != MsgTag::TokenPackageMsg)
    return fail(4, "personalize", Err::ParseError);
  Bytes token_package = package_msg.value().body;

  auto sel = world.host_apdu(select_command(applet_aid()));
  if (!sel || !sel.value().ok()) return fail(4, "personalize", Err::ApduError);
  auto blob = world.tee.personalize_via_qr(world, token_package,
                                           world.qr_letter.qr_payload(),
                                           world.config.init_pin);
  if (!blob) return fail(4, "personalize", blob.error());
  store.store_blob(kTokenBlobKey, blob.value());
  pass(4, "personalize");

  initialized = true;
  report.success = true;
  return report;
}

Outcome<TcToken> HostApp::handle_tc_token_url(World& world, const std::string& url_like) {
  const std::string prefix = "eid://";
  if (url_like.rfind(prefix, 0) != 0) return Err::UnknownOfferer;
  std::string offerer_id = url_like.substr(prefix.size());
  if (offerer_id != kOffererId) return Err::UnknownOfferer;
  ByteWriter w;
  w.str(url_like);
  auto reply = exchange(world, Channel::HOST_EIDSERVER, offerer_id,
                        Msg{MsgTag::TcTokenRequest, w.take()});
  if (!reply) return reply.error();
  if (reply.value().tag != MsgTag::TcTokenMsg) return Err::ParseError;
  ByteReader r(reply.value().body);
  auto tc = TcToken::decode(r.bytes());
  if (!tc || !r.done()) return Err::ParseError;
  return *tc;
}

AuthReport HostApp::run_authentication(World& world, const TcToken& tc) {
  AuthReport report;
  auto fail = [&](int step, const std::string& name, Err cause) {
    report.steps.push_back({step, name, err_name(cause)});
    report.abort_step = step;
    report.abort_cause = cause;
    report.success = false;
    return report;
  };
  auto pass = [&](int step, const std::string& name) {
    report.steps.push_back({step, name, "ok"});
  };

  // 1) Offerer link clicked; secure connection to the eID server.
  if (!initialized) return fail(1, "connect-eid-server", Err::NotInitialized);
  ByteWriter start;
  start.bytes(tc.offerer_session_id);
  start.bytes(tc.encode());
  auto ack = exchange(world, Channel::HOST_EIDSERVER, kServerId,
                      Msg{MsgTag::AuthStart, start.take()});
  if (!ack) return fail(1, "connect-eid-server", ack.error());
  if (auto err = actors::msg_error(ack.value())) return fail(1, "connect-eid-server", *err);
  if (ack.value().tag != MsgTag::AuthAck) return fail(1, "connect-eid-server", Err::ParseError);
  pass(1, "connect-eid-server");

  // 2) PIN entry inside the TEE unlocks the SE.
  auto sel = world.host_apdu(select_command(applet_aid()));
  if (!sel || !sel.value().ok()) return fail(2, "pin-entry", Err::ApduError);
  bool unlocked = false;
  for (const auto& attempt : world.config.auth_pin_attempts) {
    auto resp = world.tee.secure_pin_entry(world, attempt);
    if (!resp) return fail(2, "pin-entry", resp.error());
    if (resp.value().ok()) {
      unlocked = true;
      break;
    }
    if (resp.value().sw == apdu::kSwBlocked) return fail(2, "pin-entry", Err::PinBlocked);
  }
  if (!unlocked) return fail(2, "pin-entry", Err::PinRejected);
  pass(2, "pin-entry");

  // 3-4) Terminal and chip authentication, server-driven through the host.
  ByteWriter sid;
  sid.bytes(tc.offerer_session_id);
  Bytes sid_prefix = sid.take();
  auto handshake = relay_loop(world, Channel::HOST_EIDSERVER, kServerId,
                              Msg{MsgTag::EacPoll, sid_prefix}, MsgTag::EacApduResult,
                              sid_prefix);
  if (!handshake) return fail(3, "terminal-authentication", handshake.error());
  if (handshake.value().tag != MsgTag::EacHandshakeDone) {
    Err cause = Err::TaFailed;
    if (handshake.value().tag == MsgTag::AuthFail) {
      ByteReader r(handshake.value().body);
      cause = static_cast<Err>(r.u16());
    }
    bool ca_phase = cause == Err::CaChainInvalid || cause == Err::CaKeyConfirmFailed ||
                    cause == Err::CaCommitmentMismatch;
    return fail(ca_phase ? 4 : 3,
                ca_phase ? "chip-authentication" : "terminal-authentication", cause);
  }
  report.ta_ok = true;
  report.ca_ok = true;
  pass(3, "terminal-authentication");
  pass(4, "chip-authentication");

  // 5) Encrypted token from untrusted storage into the SE.
  auto blob = store.load_blob(kTokenBlobKey);
  if (!blob) return fail(5, "load-token", blob.error());
  Bytes blob_bytes = blob.value();
  if (world.config.tamper_stored_blob && !blob_bytes.empty()) blob_bytes[16] ^= 0x01;
  auto loaded = world.host_apdu_large(apdu::kClaProprietary, apdu::kInsLoadToken, 0, 0,
                                      blob_bytes);
  if (!loaded) return fail(5, "load-token", loaded.error());
  if (!loaded.value().ok()) return fail(5, "load-token", Err::BlobTamper);
  pass(5, "load-token");

  // 6) The user decides inside the TEE which attributes may leave.
  std::set<std::string> choice = world.config.consent_choice
                                     ? *world.config.consent_choice
                                     : tc.required_attributes;
  auto consent = world.tee.capture_consent(world, tc.required_attributes, choice);
  if (!consent) return fail(6, "consent", consent.error());
  report.approved = consent.value().approved;
  pass(6, "consent");

  // 7) Attribute transfer over secure messaging, then delivery to the offerer.
  auto transfer_result = relay_loop(world, Channel::HOST_EIDSERVER, kServerId,
                                    Msg{MsgTag::ConsentReady, sid_prefix},
                                    MsgTag::EacApduResult, sid_prefix);
  if (!transfer_result) return fail(7, "secure-messaging-transfer", transfer_result.error());
  if (transfer_result.value().tag != MsgTag::AuthDone) {
    Err cause = Err::SmTamper;
    if (transfer_result.value().tag == MsgTag::AuthFail) {
      ByteReader r(transfer_result.value().body);
      cause = static_cast<Err>(r.u16());
    }
    return fail(7, "secure-messaging-transfer", cause);
  }
  pass(7, "secure-messaging-transfer");

  // 8) Lock the SE again.
  apdu::ApduCommand lock;
  lock.cla = apdu::kClaProprietary;
  lock.ins = apdu::kInsLockAccess;
  auto locked = world.host_apdu(lock);
  if (!locked || !locked.value().ok()) return fail(8, "lock", Err::ApduError);
  pass(8, "lock");

  report.success = true;
  return report;
}

}  // namespace meid::host
