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

#include "meid/actors.hpp"

#include <algorithm>

#include "meid/world.hpp"

namespace meid::actors {

using apdu::ApduCommand;
using apdu::ApduResponse;

Bytes Msg::encode() const {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(tag));
  w.bytes(body);
  return w.take();
}

std::optional<Msg> Msg::decode(BytesView b) {
  ByteReader r(b);
  Msg m;
  m.tag = static_cast<MsgTag>(r.u8());
  m.body = r.bytes();
  if (!r.done()) return std::nullopt;
  return m;
}

Msg error_msg(Err code) {
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(code));
  return Msg{MsgTag::ErrorMsg, w.take()};
}

std::optional<Err> msg_error(const Msg& m) {
  if (m.tag != MsgTag::ErrorMsg) return std::nullopt;
  ByteReader r(m.body);
  Err code = static_cast<Err>(r.u16());
  return r.done() ? code : Err::ParseError;
}

std::string QrLetter::qr_payload() const {
  return tee::encode_qr_payload(qr_keypair.private_part);
}

bool Registry::contains(const std::string& document_number) const {
  return used_.count(document_number) != 0;
}

void Registry::add(const std::string& document_number) { used_.insert(document_number); }

namespace {

Msg apdu_for_se(const ApduCommand& cmd) { return Msg{MsgTag::ApduForSe, cmd.encode()}; }

std::optional<ApduResponse> parse_resp_body(ByteReader& r) {
  Bytes resp_bytes = r.bytes();
  if (!r.done()) return std::nullopt;
  return ApduResponse::parse(resp_bytes);
}

ApduCommand select_command(const Bytes& aid) {
  ApduCommand cmd;
  cmd.cla = apdu::kClaIso;
  cmd.ins = apdu::kInsSelect;
  cmd.p1 = 0x04;
  cmd.data = aid;
  return cmd;
}

}  // namespace

// ---------------------------------------------------------------------------
// Issuer

Bytes Issuer::handle(World& world, BytesView request) {
  auto msg = Msg::decode(request);
  if (!msg) return error_msg(Err::ParseError).encode();
  return handle_msg(world, *msg).encode();
}

Msg Issuer::handle_msg(World& world, const Msg& m) {
  switch (m.tag) {
    case MsgTag::SsdForward: {
      ByteReader r(m.body);
      std::uint32_t ticket = r.u32();
      std::string se_id = r.str();
      Bytes aid = r.bytes();
      Bytes dap = r.bytes();
      if (!r.done()) return error_msg(Err::ParseError);
      auto rec = manufactured.find(se_id);
      if (rec == manufactured.end()) return error_msg(Err::UnknownSecureElement);
      Session s;
      s.ticket = ticket;
      s.se_id = se_id;
      s.tsm_aid = aid;
      s.dap_public = dap;
      s.channel.emplace(rec->second.s_enc, rec->second.s_mac);
      sessions_.insert_or_assign(ticket, std::move(s));
      return Msg{MsgTag::Ack, {}};
    }
    case MsgTag::ProvisionPoll: {
      ByteReader r(m.body);
      std::uint32_t ticket = r.u32();
      auto it = sessions_.find(ticket);
      if (!r.done() || it == sessions_.end()) return error_msg(Err::SessionUnknown);
      auto rec = manufactured.find(it->second.se_id);
      it->second.stage = Session::Stage::SelectSent;
      return apdu_for_se(select_command(rec->second.isd_aid));
    }
    case MsgTag::ProvisionApduResult: {
      ByteReader r(m.body);
      std::uint32_t ticket = r.u32();
      auto resp = parse_resp_body(r);
      auto it = sessions_.find(ticket);
      if (!resp || it == sessions_.end()) return error_msg(Err::ParseError);
      return advance(world, it->second, *resp);
    }
    default:
      return error_msg(Err::ParseError);
  }
}

Msg Issuer::advance(World& world, Session& s, const ApduResponse& resp) {
  auto done = [&](bool ok) {
    s.stage = ok ? Session::Stage::Done : Session::Stage::Failed;
    ByteWriter w;
    w.u8(ok ? 1 : 0);
    return Msg{MsgTag::ProvisionDone, w.take()};
  };
  switch (s.stage) {
    case Session::Stage::SelectSent: {
      if (!resp.ok()) return done(false);
      s.stage = Session::Stage::InitSent;
      return apdu_for_se(s.channel->initialize_update(world.rng));
    }
    case Session::Stage::InitSent: {
      if (!s.channel->absorb_init_response(resp)) return done(false);
      s.stage = Session::Stage::AuthSent;
      return apdu_for_se(s.channel->external_authenticate());
    }
    case Session::Stage::AuthSent: {
      if (!resp.ok()) return done(false);
      // Fresh initial keys for the TSM, installed together with its DAP key.
      s.new_enc = crypto::random_symmetric_key(crypto::KeyPurpose::ENC, world.rng);
      s.new_mac = crypto::random_symmetric_key(crypto::KeyPurpose::MAC, world.rng);
      world.register_secret(s.new_enc.bytes);
      world.register_secret(s.new_mac.bytes);
      se::InstallSsdPayload payload{s.tsm_aid, s.new_enc, s.new_mac, s.dap_public, {}};
      ApduCommand header;
      header.cla = apdu::kClaProprietary;
      header.ins = apdu::kInsInstall;
      header.p1 = apdu::kInstallP1Ssd;
      Bytes wrapped = s.channel->wrap_command_data(payload.encode(), header, world.nonces);
      for (auto& cmd : apdu::chain_split(header.cla, header.ins, header.p1, header.p2, wrapped))
        s.pending.push_back(std::move(cmd));
      s.stage = Session::Stage::InstallSent;
      Msg next = apdu_for_se(s.pending.front());
      s.pending.pop_front();
      return next;
    }
    case Session::Stage::InstallSent: {
      if (!resp.ok()) return done(false);
      if (!s.pending.empty()) {
        Msg next = apdu_for_se(s.pending.front());
        s.pending.pop_front();
        return next;
      }
      // "sends the new keys to the TSM" over the pre-authenticated link.
      issued_keys[s.ticket] = {s.new_enc, s.new_mac};
      ByteWriter w;
      w.u32(s.ticket);
      w.bytes(s.tsm_aid);
      w.raw(s.new_enc.bytes);
      w.raw(s.new_mac.bytes);
      auto reply = world.server_side(kIssuerId, kTsmId,
                                     Msg{MsgTag::TsmKeysHandoff, w.take()}.encode());
      if (!reply) return done(false);
      auto ack = Msg::decode(reply.value());
      if (!ack || ack->tag != MsgTag::Ack) return done(false);
      return done(true);
    }
    case Session::Stage::Done:
    case Session::Stage::Failed:
      return error_msg(Err::SessionUnknown);
  }
  return error_msg(Err::ParseError);
}

// ---------------------------------------------------------------------------
// TSM

Bytes Tsm::handle(World& world, BytesView request) {
  auto msg = Msg::decode(request);
  if (!msg) return error_msg(Err::ParseError).encode();
  return handle_msg(world, *msg).encode();
}

Msg Tsm::handle_msg(World& world, const Msg& m) {
  switch (m.tag) {
    case MsgTag::SsdRequest: {
      ByteReader r(m.body);
      std::string se_id = r.str();
      if (!r.done()) return error_msg(Err::ParseError);
      std::uint32_t ticket = next_ticket_++;
      // Forward to the issuer, carrying our DAP public key for the new domain.
      ByteWriter w;
      w.u32(ticket);
      w.str(se_id);
      w.bytes(tsm_aid);
      w.bytes(dap_keypair.public_part);
      auto reply =
          world.server_side(kTsmId, kIssuerId, Msg{MsgTag::SsdForward, w.take()}.encode());
      if (!reply) return error_msg(Err::Dropped);
      auto ack = Msg::decode(reply.value());
      if (!ack) return error_msg(Err::ParseError);
      if (auto err = msg_error(*ack)) return error_msg(*err);
      Session s;
      s.se_id = se_id;
      sessions_.insert_or_assign(ticket, std::move(s));
      ByteWriter out;
      out.u32(ticket);
      return Msg{MsgTag::SsdTicket, out.take()};
    }
    case MsgTag::TsmKeysHandoff: {
      ByteReader r(m.body);
      std::uint32_t ticket = r.u32();
      Bytes aid = r.bytes();
      Bytes enc = r.raw(crypto::kSymmetricKeyLen);
      Bytes mac = r.raw(crypto::kSymmetricKeyLen);
      auto it = sessions_.find(ticket);
      if (!r.done() || it == sessions_.end()) return error_msg(Err::SessionUnknown);
      it->second.initial_enc = crypto::SymmetricKey{crypto::KeyPurpose::ENC, enc};
      it->second.initial_mac = crypto::SymmetricKey{crypto::KeyPurpose::MAC, mac};
      it->second.stage = Session::Stage::KeysReady;
      return Msg{MsgTag::Ack, {}};
    }
    case MsgTag::TsmPoll: {
      ByteReader r(m.body);
      std::uint32_t ticket = r.u32();
      auto it = sessions_.find(ticket);
      if (!r.done() || it == sessions_.end()) return error_msg(Err::SessionUnknown);
      Session& s = it->second;
      if (s.stage != Session::Stage::KeysReady || !s.initial_enc)
        return error_msg(Err::EacStateError);
      s.channel.emplace(*s.initial_enc, *s.initial_mac);
      s.stage = Session::Stage::RotateSelectSent;
      return apdu_for_se(select_command(tsm_aid));
    }
    case MsgTag::TsmDeploy: {
      ByteReader r(m.body);
      std::uint32_t ticket = r.u32();
      auto it = sessions_.find(ticket);
      if (!r.done() || it == sessions_.end()) return error_msg(Err::SessionUnknown);
      Session& s = it->second;
      if (s.stage != Session::Stage::RotateDone || !current_enc)
        return error_msg(Err::EacStateError);
      s.channel.emplace(*current_enc, *current_mac);
      s.stage = Session::Stage::DeploySelectSent;
      return apdu_for_se(select_command(tsm_aid));
    }
    case MsgTag::TsmApduResult: {
      ByteReader r(m.body);
      std::uint32_t ticket = r.u32();
      auto resp = parse_resp_body(r);
      auto it = sessions_.find(ticket);
      if (!resp || it == sessions_.end()) return error_msg(Err::ParseError);
      return advance(world, it->second, *resp);
    }
    case MsgTag::PersonalizeForward: {
      ByteReader r(m.body);
      Bytes sealed = r.bytes();
      if (!r.done()) return error_msg(Err::ParseError);
      ByteWriter w;
      w.bytes(sealed);
      auto reply =
          world.server_side(kTsmId, kSpId, Msg{MsgTag::SpPersonalize, w.take()}.encode());
      if (!reply) return error_msg(Err::Dropped);
      auto sp_msg = Msg::decode(reply.value());
      if (!sp_msg) return error_msg(Err::ParseError);
      if (auto err = msg_error(*sp_msg)) return error_msg(*err);
      if (sp_msg->tag != MsgTag::SpToken) return error_msg(Err::ParseError);
      return Msg{MsgTag::TokenPackageMsg, sp_msg->body};
    }
    default:
      return error_msg(Err::ParseError);
  }
}

Msg Tsm::advance(World& world, Session& s, const ApduResponse& resp) {
  auto stage_done = [&](std::uint8_t stage, bool ok) {
    if (!ok) s.stage = Session::Stage::Failed;
    ByteWriter w;
    w.u8(stage);
    w.u8(ok ? 1 : 0);
    return Msg{MsgTag::TsmStageDone, w.take()};
  };
  switch (s.stage) {
    case Session::Stage::RotateSelectSent: {
      if (!resp.ok()) return stage_done(1, false);
      s.stage = Session::Stage::RotateInitSent;
      return apdu_for_se(s.channel->initialize_update(world.rng));
    }
    case Session::Stage::RotateInitSent: {
      if (!s.channel->absorb_init_response(resp)) return stage_done(1, false);
      s.stage = Session::Stage::RotateAuthSent;
      return apdu_for_se(s.channel->external_authenticate());
    }
    case Session::Stage::RotateAuthSent: {
      if (!resp.ok()) return stage_done(1, false);
      s.next_enc = crypto::random_symmetric_key(crypto::KeyPurpose::ENC, world.rng);
      s.next_mac = crypto::random_symmetric_key(crypto::KeyPurpose::MAC, world.rng);
      world.register_secret(s.next_enc.bytes);
      world.register_secret(s.next_mac.bytes);
      Bytes payload = concat({s.next_enc.bytes, s.next_mac.bytes});
      ApduCommand header;
      header.cla = apdu::kClaProprietary;
      header.ins = apdu::kInsPutKey;
      Bytes wrapped = s.channel->wrap_command_data(payload, header, world.nonces);
      for (auto& cmd : apdu::chain_split(header.cla, header.ins, header.p1, header.p2, wrapped))
        s.pending.push_back(std::move(cmd));
      s.stage = Session::Stage::RotatePutSent;
      Msg next = apdu_for_se(s.pending.front());
      s.pending.pop_front();
      return next;
    }
    case Session::Stage::RotatePutSent: {
      if (!resp.ok()) return stage_done(1, false);
      if (!s.pending.empty()) {
        Msg next = apdu_for_se(s.pending.front());
        s.pending.pop_front();
        return next;
      }
      current_enc = s.next_enc;
      current_mac = s.next_mac;
      s.stage = Session::Stage::RotateDone;
      return stage_done(1, true);
    }
    case Session::Stage::DeploySelectSent: {
      if (!resp.ok()) return stage_done(2, false);
      s.stage = Session::Stage::DeployInitSent;
      return apdu_for_se(s.channel->initialize_update(world.rng));
    }
    case Session::Stage::DeployInitSent: {
      if (!s.channel->absorb_init_response(resp)) return stage_done(2, false);
      s.stage = Session::Stage::DeployAuthSent;
      return apdu_for_se(s.channel->external_authenticate());
    }
    case Session::Stage::DeployAuthSent: {
      if (!resp.ok()) return stage_done(2, false);
      se::AppletPackage package{applet_aid, cvca_cert, csca_cert};
      Bytes package_bytes = package.encode();
      se::InstallAppletPayload payload{package_bytes,
                                       crypto::sign(dap_keypair, package_bytes)};
      ApduCommand header;
      header.cla = apdu::kClaProprietary;
      header.ins = apdu::kInsInstall;
      header.p1 = apdu::kInstallP1Applet;
      Bytes wrapped = s.channel->wrap_command_data(payload.encode(), header, world.nonces);
      for (auto& cmd : apdu::chain_split(header.cla, header.ins, header.p1, header.p2, wrapped))
        s.pending.push_back(std::move(cmd));
      s.stage = Session::Stage::DeployInstallSent;
      Msg next = apdu_for_se(s.pending.front());
      s.pending.pop_front();
      return next;
    }
    case Session::Stage::DeployInstallSent: {
      if (!resp.ok()) return stage_done(2, false);
      if (!s.pending.empty()) {
        Msg next = apdu_for_se(s.pending.front());
        s.pending.pop_front();
        return next;
      }
      s.stage = Session::Stage::Done;
      return stage_done(2, true);
    }
    default:
      return error_msg(Err::EacStateError);
  }
}

// ---------------------------------------------------------------------------
// Service provider

Bytes ServiceProvider::handle(World& world, BytesView request) {
  auto msg = Msg::decode(request);
  if (!msg || msg->tag != MsgTag::SpPersonalize) return error_msg(Err::ParseError).encode();
  ByteReader r(msg->body);
  Bytes sealed = r.bytes();
  if (!r.done()) return error_msg(Err::ParseError).encode();

  auto plain = crypto::hybrid_open(enc_keypair, sealed, to_bytes("sp-upload"));
  if (!plain) return error_msg(Err::ValidationFailed).encode();
  auto captured = CapturedDocument::decode(*plain);
  if (!captured) return error_msg(Err::ParseError).encode();

  auto package = personalize(world, *captured);
  if (!package) return error_msg(package.error()).encode();
  return Msg{MsgTag::SpToken, package.value().sealed}.encode();
}

Outcome<TokenPackage> ServiceProvider::personalize(World& world,
                                                   const CapturedDocument& captured) {
  auto rec = provisioned.find(captured.fields.document_number);
  if (rec == provisioned.end()) return Err::ValidationFailed;
  if (!(rec->second.token == captured.fields) ||
      rec->second.card_pin_proof != captured.card_pin_proof) {
    return Err::ValidationFailed;
  }
  if (registry.contains(captured.fields.document_number)) return Err::AlreadyRegistered;

  crypto::KeyPair chip = crypto::generate_keypair(crypto::GroupId::X25519, world.rng);
  world.register_secret(chip.private_part);
  // The chain is presented during CA, so the subject is a pseudonym rather
  // than the document number.
  Bytes pseudonym = crypto::sha256(to_bytes("chip-id:" + captured.fields.document_number));
  pseudonym.resize(6);
  auto chip_cert = pki::issue_certificate(
      ds_keypair, ds_cert, "chip-" + hex_encode(pseudonym), crypto::GroupId::X25519,
      chip.public_part, pki::Role::CHIP, 0, ds_cert.not_after);
  if (!chip_cert) return chip_cert.error();
  pki::CertChain chain{{csca_cert, ds_cert, chip_cert.value()}};

  se::TokenPackagePlain plain{rec->second.token, chip.private_part, chain};
  Bytes sealed = crypto::hybrid_seal(rec->second.qr_public, plain.encode(),
                                     to_bytes("token-package"), world.rng, world.nonces);
  registry.add(captured.fields.document_number);
  return TokenPackage{std::move(sealed)};
}

// ---------------------------------------------------------------------------
// eID server

Bytes EidServer::handle(World& world, BytesView request) {
  auto msg = Msg::decode(request);
  if (!msg) return error_msg(Err::ParseError).encode();
  return handle_msg(world, *msg).encode();
}

void EidServer::queue_eac(AuthSession& s, const eac::Message& msg) {
  for (auto& cmd : apdu::chain_split(apdu::kClaProprietary, apdu::kInsEacStep, 0, 0,
                                     msg.encode()))
    s.pending.push_back(std::move(cmd));
}

Msg EidServer::handle_msg(World& world, const Msg& m) {
  switch (m.tag) {
    case MsgTag::AuthStart: {
      ByteReader r(m.body);
      Bytes sid = r.bytes();
      auto tc = host::TcToken::decode(r.bytes());
      if (!r.done() || !tc) return error_msg(Err::ParseError);
      for (const auto& name : tc->required_attributes) {
        if (std::find(terminal_attributes.begin(), terminal_attributes.end(), name) ==
            terminal_attributes.end()) {
          return error_msg(Err::RequestExceedsCertificate);
        }
      }
      AuthSession s;
      s.required = tc->required_attributes;
      s.offerer_session_id = tc->offerer_session_id;
      s.initiator.emplace(&terminal_keypair, &terminal_chain, &csca_anchor, &world.now,
                          &world.rng, &world.secret_log);
      sessions_.insert_or_assign(sid, std::move(s));
      ta_ok_last = ca_ok_last = false;
      return Msg{MsgTag::AuthAck, {}};
    }
    case MsgTag::EacPoll: {
      ByteReader r(m.body);
      Bytes sid = r.bytes();
      auto it = sessions_.find(sid);
      if (!r.done() || it == sessions_.end()) return error_msg(Err::SessionUnknown);
      AuthSession& s = it->second;
      queue_eac(s, s.initiator->start());
      Msg next = apdu_for_se(s.pending.front());
      s.pending.pop_front();
      return next;
    }
    case MsgTag::EacApduResult: {
      ByteReader r(m.body);
      Bytes sid = r.bytes();
      auto resp = parse_resp_body(r);
      auto it = sessions_.find(sid);
      if (!resp || it == sessions_.end()) return error_msg(Err::SessionUnknown);
      return advance(world, it->second, *resp);
    }
    case MsgTag::ConsentReady: {
      ByteReader r(m.body);
      Bytes sid = r.bytes();
      auto it = sessions_.find(sid);
      if (!r.done() || it == sessions_.end()) return error_msg(Err::SessionUnknown);
      AuthSession& s = it->second;
      if (s.stage != AuthSession::Stage::AwaitConsent) return error_msg(Err::EacStateError);
      ApduCommand inner;
      inner.cla = apdu::kClaProprietary;
      inner.ins = apdu::kInsGetAttributes;
      ApduCommand sm_cmd;
      sm_cmd.cla = apdu::kClaProprietary;
      sm_cmd.ins = apdu::kInsSecureMessage;
      sm_cmd.data = s.sm->wrap(inner.encode(), world.nonces);
      s.stage = AuthSession::Stage::SmSent;
      return apdu_for_se(sm_cmd);
    }
    default:
      return error_msg(Err::ParseError);
  }
}

Msg EidServer::advance(World& world, AuthSession& s, const ApduResponse& resp) {
  auto fail = [&](Err code) {
    s.stage = AuthSession::Stage::Failed;
    ByteWriter w;
    w.u16(static_cast<std::uint16_t>(code));
    return Msg{MsgTag::AuthFail, w.take()};
  };
  switch (s.stage) {
    case AuthSession::Stage::Handshake: {
      if (!resp.ok()) {
        // Secure-messaging style error bodies carry the specific code.
        if (resp.data.size() == 2) {
          ByteReader r(resp.data);
          return fail(static_cast<Err>(r.u16()));
        }
        return fail(Err::EacStateError);
      }
      if (!s.pending.empty()) {
        Msg next = apdu_for_se(s.pending.front());
        s.pending.pop_front();
        return next;
      }
      auto eac_msg = eac::Message::decode(resp.data);
      if (!eac_msg) return fail(Err::ParseError);
      auto step = s.initiator->handle(*eac_msg);
      if (!step) return fail(step.error());
      if (step.value()) {
        queue_eac(s, *step.value());
        Msg next = apdu_for_se(s.pending.front());
        s.pending.pop_front();
        return next;
      }
      // Handshake complete: both TA and CA accepted.
      ta_ok_last = ca_ok_last = true;
      s.sm.emplace(*s.initiator->session_keys(), /*is_initiator=*/true);
      s.stage = AuthSession::Stage::AwaitConsent;
      return Msg{MsgTag::EacHandshakeDone, {}};
    }
    case AuthSession::Stage::SmSent: {
      if (!resp.ok()) {
        if (resp.data.size() == 2) {
          ByteReader r(resp.data);
          return fail(static_cast<Err>(r.u16()));
        }
        return fail(Err::SmTamper);
      }
      auto inner_bytes = s.sm->unwrap(resp.data);
      if (!inner_bytes) return fail(inner_bytes.error());
      auto inner = ApduResponse::parse(inner_bytes.value());
      if (!inner || !inner->ok()) return fail(Err::SmTamper);
      auto attrs = decode_attribute_map(inner->data);
      if (!attrs) return fail(Err::ParseError);

      ByteWriter w;
      w.bytes(s.offerer_session_id);
      w.bytes(encode_attribute_map(*attrs));
      auto reply = world.server_side(kServerId, kOffererId,
                                     Msg{MsgTag::DeliverAttributes, w.take()}.encode());
      if (!reply) return fail(Err::Dropped);
      auto ack = Msg::decode(reply.value());
      if (!ack || ack->tag != MsgTag::DeliverAck) {
        return fail(ack && msg_error(*ack) ? *msg_error(*ack) : Err::ParseError);
      }
      s.stage = AuthSession::Stage::Done;
      ByteWriter out;
      out.u8(1);
      return Msg{MsgTag::AuthDone, out.take()};
    }
    default:
      return error_msg(Err::EacStateError);
  }
}

// ---------------------------------------------------------------------------
// Offerer

Bytes Offerer::handle(World& world, BytesView request) {
  auto msg = Msg::decode(request);
  if (!msg) return error_msg(Err::ParseError).encode();
  switch (msg->tag) {
    case MsgTag::TcTokenRequest: {
      host::TcToken tc = create_tc_token(world);
      ByteWriter w;
      w.bytes(tc.encode());
      return Msg{MsgTag::TcTokenMsg, w.take()}.encode();
    }
    case MsgTag::DeliverAttributes: {
      ByteReader r(msg->body);
      Bytes sid = r.bytes();
      auto attrs = decode_attribute_map(r.bytes());
      if (!r.done() || !attrs) return error_msg(Err::ParseError).encode();
      auto it = sessions.find(sid);
      if (it == sessions.end()) return error_msg(Err::SessionUnknown).encode();
      it->second = *attrs;
      return Msg{MsgTag::DeliverAck, {}}.encode();
    }
    default:
      return error_msg(Err::ParseError).encode();
  }
}

host::TcToken Offerer::create_tc_token(World& world) {
  host::TcToken tc;
  tc.required_attributes = required_attributes;
  tc.eid_server_address = kServerId;
  tc.offerer_session_id = world.rng.bytes(8);
  sessions[tc.offerer_session_id] = std::nullopt;
  return tc;
}

}  // namespace meid::actors
