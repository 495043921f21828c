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

#include "meid/secure_element.hpp"

#include <algorithm>

namespace meid::se {

using apdu::ApduCommand;
using apdu::ApduResponse;

namespace {

constexpr std::size_t kMaxChainedPayload = 65536;

Bytes gp_nonce(std::uint64_t counter) { return crypto::make_nonce('G', 'P', 0, counter); }

bool valid_aid(BytesView aid) { return aid.size() >= 5 && aid.size() <= 16; }

bool valid_pin_format(const std::string& pin) {
  return pin.size() == 6 &&
         std::all_of(pin.begin(), pin.end(), [](char c) { return c >= '0' && c <= '9'; });
}

Bytes pin_hash(BytesView salt, const std::string& digits) {
  return crypto::sha256(concat({salt, to_bytes(digits)}));
}

}  // namespace

Bytes InstallSsdPayload::encode() const {
  ByteWriter w;
  w.bytes(aid);
  w.raw(s_enc.bytes);
  w.raw(s_mac.bytes);
  w.bytes(dap_public);
  w.bytes(params);
  return w.take();
}

std::optional<InstallSsdPayload> InstallSsdPayload::decode(BytesView b) {
  ByteReader r(b);
  InstallSsdPayload p;
  p.aid = r.bytes();
  p.s_enc = crypto::SymmetricKey{crypto::KeyPurpose::ENC, r.raw(crypto::kSymmetricKeyLen)};
  p.s_mac = crypto::SymmetricKey{crypto::KeyPurpose::MAC, r.raw(crypto::kSymmetricKeyLen)};
  p.dap_public = r.bytes();
  p.params = r.bytes();
  if (!r.done() || !valid_aid(p.aid)) return std::nullopt;
  return p;
}

Bytes AppletPackage::encode() const {
  ByteWriter w;
  w.bytes(aid);
  w.bytes(cvca_cert.encode());
  w.bytes(csca_cert.encode());
  return w.take();
}

std::optional<AppletPackage> AppletPackage::decode(BytesView b) {
  ByteReader r(b);
  AppletPackage p;
  p.aid = r.bytes();
  auto cvca = pki::Certificate::decode(r.bytes());
  auto csca = pki::Certificate::decode(r.bytes());
  if (!cvca || !csca || !r.done() || !valid_aid(p.aid)) return std::nullopt;
  p.cvca_cert = std::move(*cvca);
  p.csca_cert = std::move(*csca);
  return p;
}

Bytes InstallAppletPayload::encode() const {
  ByteWriter w;
  w.bytes(package);
  w.bytes(dap_signature);
  return w.take();
}

std::optional<InstallAppletPayload> InstallAppletPayload::decode(BytesView b) {
  ByteReader r(b);
  InstallAppletPayload p;
  p.package = r.bytes();
  p.dap_signature = r.bytes();
  if (!r.done()) return std::nullopt;
  return p;
}

Bytes PersonalizePayload::encode() const {
  ByteWriter w;
  w.bytes(token_package);
  w.bytes(qr_private);
  w.str(pin_digits);
  return w.take();
}

std::optional<PersonalizePayload> PersonalizePayload::decode(BytesView b) {
  ByteReader r(b);
  PersonalizePayload p;
  p.token_package = r.bytes();
  p.qr_private = r.bytes();
  p.pin_digits = r.str();
  if (!r.done() || p.qr_private.size() != crypto::kPrivateKeyLen) return std::nullopt;
  return p;
}

Bytes TokenPackagePlain::encode() const {
  ByteWriter w;
  w.bytes(token.encode());
  w.bytes(chip_private);
  w.bytes(chip_chain.encode());
  return w.take();
}

std::optional<TokenPackagePlain> TokenPackagePlain::decode(BytesView b) {
  ByteReader r(b);
  auto token = EidToken::decode(r.bytes());
  Bytes priv = r.bytes();
  auto chain = pki::CertChain::decode(r.bytes());
  if (!token || !chain || !r.done() || priv.size() != crypto::kPrivateKeyLen)
    return std::nullopt;
  return TokenPackagePlain{std::move(*token), std::move(priv), std::move(*chain)};
}

SecureElement::SecureElement(std::string se_id, Rng* rng, const std::uint64_t* clock,
                             crypto::NonceRegistry* nonces, std::vector<Bytes>* secret_log)
    : se_id_(std::move(se_id)), rng_(rng), clock_(clock), nonces_(nonces),
      secret_log_(secret_log) {}

void SecureElement::install_issuer_domain(Bytes aid, crypto::SymmetricKey s_enc,
                                          crypto::SymmetricKey s_mac) {
  SecurityDomain d;
  d.aid = std::move(aid);
  d.owner = DomainOwner::ISSUER;
  d.s_enc = std::move(s_enc);
  d.s_mac = std::move(s_mac);
  domains_.push_back(std::move(d));
}

const SecurityDomain* SecureElement::find_domain(BytesView aid) const {
  for (const auto& d : domains_)
    if (BytesView(d.aid).size() == aid.size() && std::equal(aid.begin(), aid.end(), d.aid.begin()))
      return &d;
  return nullptr;
}

const EidApplet* SecureElement::find_applet(BytesView aid) const {
  for (const auto& d : domains_)
    for (const auto& a : d.applets)
      if (a.aid.size() == aid.size() && std::equal(aid.begin(), aid.end(), a.aid.begin()))
        return &a;
  return nullptr;
}

EidApplet* SecureElement::mutable_applet(BytesView aid) {
  return const_cast<EidApplet*>(find_applet(aid));
}

SecurityDomain* SecureElement::selected_domain() {
  return const_cast<SecurityDomain*>(find_domain(selected_aid_));
}

EidApplet* SecureElement::selected_applet() { return mutable_applet(selected_aid_); }

void SecureElement::close_session() { session_.reset(); }

apdu::ApduResponse SecureElement::process(const ApduCommand& cmd) {
  if (chain_head_) {
    if (cmd.ins != chain_head_->ins || cmd.p1 != chain_head_->p1 ||
        cmd.p2 != chain_head_->p2) {
      chain_head_.reset();
      chain_data_.clear();
      return apdu::status(apdu::kSwWrongData);
    }
    if (chain_data_.size() + cmd.data.size() > kMaxChainedPayload) {
      chain_head_.reset();
      chain_data_.clear();
      return apdu::status(apdu::kSwWrongData);
    }
    chain_data_.insert(chain_data_.end(), cmd.data.begin(), cmd.data.end());
    if (cmd.chained()) return apdu::status(apdu::kSwOk);
    ApduCommand logical = cmd;
    logical.data = std::move(chain_data_);
    chain_head_.reset();
    chain_data_.clear();
    return dispatch(logical);
  }
  if (cmd.chained()) {
    chain_head_ = cmd;
    chain_data_ = cmd.data;
    return apdu::status(apdu::kSwOk);
  }
  return dispatch(cmd);
}

apdu::ApduResponse SecureElement::dispatch(const ApduCommand& cmd) {
  switch (cmd.ins) {
    case apdu::kInsSelect: return handle_select(cmd);
    case apdu::kInsInitializeUpdate: return handle_initialize_update(cmd);
    case apdu::kInsExternalAuthenticate: return handle_external_authenticate(cmd);
    case apdu::kInsInstall: return handle_install(cmd);
    case apdu::kInsPutKey: return handle_put_key(cmd);
    case apdu::kInsVerifyPin: return handle_verify_pin(cmd);
    case apdu::kInsPersonalize: return handle_personalize(cmd);
    case apdu::kInsLoadToken: return handle_load_token(cmd);
    case apdu::kInsSetConsent: return handle_set_consent(cmd);
    case apdu::kInsGetTaInfo: return handle_get_ta_info();
    case apdu::kInsLockAccess: return handle_lock_access();
    case apdu::kInsEacStep: return handle_eac_step(cmd);
    case apdu::kInsSecureMessage: return handle_secure_message(cmd);
    default: return apdu::status(apdu::kSwConditionsNotSatisfied);
  }
}

apdu::ApduResponse SecureElement::handle_select(const ApduCommand& cmd) {
  if (!find_domain(cmd.data) && !find_applet(cmd.data))
    return apdu::status(apdu::kSwFileNotFound);
  selected_aid_ = cmd.data;
  close_session();
  return apdu::status(apdu::kSwOk);
}

apdu::ApduResponse SecureElement::handle_initialize_update(const ApduCommand& cmd) {
  SecurityDomain* domain = selected_domain();
  if (!domain) return apdu::status(apdu::kSwConditionsNotSatisfied);
  if (session_ && session_->state != ChannelState::CLOSED)
    return apdu::status(apdu::kSwConditionsNotSatisfied);
  if (cmd.data.size() != crypto::kChallengeLen) return apdu::status(apdu::kSwWrongData);

  SecureChannelSession s;
  s.domain_aid = domain->aid;
  s.host_challenge = cmd.data;
  s.card_challenge = crypto::make_challenge(*rng_).bytes;
  s.keys = crypto::derive_session_keys(domain->s_enc, domain->s_mac, s.host_challenge,
                                       s.card_challenge);
  s.state = ChannelState::INIT_UPDATED;
  if (secret_log_) {
    secret_log_->push_back(s.keys.enc.bytes);
    secret_log_->push_back(s.keys.mac.bytes);
  }
  Bytes cryptogram = crypto::mac(s.keys.mac, concat({s.host_challenge, s.card_challenge}));
  ApduResponse resp;
  resp.data = concat({s.card_challenge, cryptogram});
  session_ = std::move(s);
  return resp;
}

apdu::ApduResponse SecureElement::handle_external_authenticate(const ApduCommand& cmd) {
  SecurityDomain* domain = selected_domain();
  if (!domain || !session_ || session_->state != ChannelState::INIT_UPDATED ||
      session_->domain_aid != domain->aid) {
    return apdu::status(apdu::kSwConditionsNotSatisfied);
  }
  Bytes expected = crypto::mac(session_->keys.mac,
                               concat({session_->card_challenge, session_->host_challenge}));
  if (cmd.data != expected) {
    close_session();
    return apdu::status(apdu::kSwAuthFailed);
  }
  session_->state = ChannelState::AUTHENTICATED;
  return apdu::status(apdu::kSwOk);
}

Outcome<Bytes> SecureElement::unwrap_protected(const ApduCommand& cmd) {
  SecurityDomain* domain = selected_domain();
  if (!domain || !session_ || session_->state != ChannelState::AUTHENTICATED ||
      session_->domain_aid != domain->aid) {
    return Err::AuthFailure;  // maps to 0x6982
  }
  auto ct = crypto::AeadCiphertext::parse(cmd.data);
  if (!ct || ct->nonce != gp_nonce(session_->keys.counter)) return Err::ParseError;
  auto plain = crypto::aead_decrypt(session_->keys.enc, *ct, cmd.header());
  if (!plain) return Err::ParseError;
  ++session_->keys.counter;
  return *plain;
}

apdu::ApduResponse SecureElement::handle_install(const ApduCommand& cmd) {
  auto plain = unwrap_protected(cmd);
  if (!plain) {
    return apdu::status(plain.error() == Err::AuthFailure ? apdu::kSwSecurityStatus
                                                          : apdu::kSwWrongData);
  }
  if (cmd.p1 == apdu::kInstallP1Ssd) return handle_install_ssd(plain.value());
  if (cmd.p1 == apdu::kInstallP1Applet) {
    return handle_install_applet(*selected_domain(), plain.value());
  }
  return apdu::status(apdu::kSwWrongData);
}

apdu::ApduResponse SecureElement::handle_install_ssd(BytesView plain) {
  SecurityDomain* domain = selected_domain();
  if (domain->owner != DomainOwner::ISSUER)
    return apdu::status(apdu::kSwConditionsNotSatisfied);
  auto payload = InstallSsdPayload::decode(plain);
  if (!payload) return apdu::status(apdu::kSwWrongData);
  if (find_domain(payload->aid) || find_applet(payload->aid))
    return apdu::status(apdu::kSwConditionsNotSatisfied);

  SecurityDomain d;
  d.aid = payload->aid;
  d.owner = DomainOwner::TSM;
  d.s_enc = payload->s_enc;
  d.s_mac = payload->s_mac;
  if (!payload->dap_public.empty()) d.dap_public = payload->dap_public;
  d.install_params = payload->params;
  domains_.push_back(std::move(d));
  if (persisted_size() > storage_budget_bytes) {
    domains_.pop_back();
    return apdu::status(apdu::kSwInsufficientSpace);
  }
  return apdu::status(apdu::kSwOk);
}

apdu::ApduResponse SecureElement::handle_install_applet(SecurityDomain& domain,
                                                        BytesView plain) {
  if (!domain.dap_public) return apdu::status(apdu::kSwConditionsNotSatisfied);
  auto payload = InstallAppletPayload::decode(plain);
  if (!payload) return apdu::status(apdu::kSwWrongData);
  if (!crypto::verify(crypto::GroupId::Ed25519, *domain.dap_public, payload->package,
                      payload->dap_signature)) {
    return apdu::status(apdu::kSwAuthFailed);
  }
  auto package = AppletPackage::decode(payload->package);
  if (!package) return apdu::status(apdu::kSwWrongData);
  if (find_domain(package->aid) || find_applet(package->aid))
    return apdu::status(apdu::kSwConditionsNotSatisfied);

  EidApplet applet;
  applet.aid = package->aid;
  applet.state = AppletState::INSTALLED;
  applet.cvca_anchor = pki::TrustAnchor{package->cvca_cert};
  applet.csca_anchor = pki::TrustAnchor{package->csca_cert};
  applet.package_size = payload->package.size();
  domain.applets.push_back(std::move(applet));
  if (persisted_size() > storage_budget_bytes) {
    domain.applets.pop_back();
    return apdu::status(apdu::kSwInsufficientSpace);
  }
  return apdu::status(apdu::kSwOk);
}

apdu::ApduResponse SecureElement::handle_put_key(const ApduCommand& cmd) {
  auto plain = unwrap_protected(cmd);
  if (!plain) {
    return apdu::status(plain.error() == Err::AuthFailure ? apdu::kSwSecurityStatus
                                                          : apdu::kSwWrongData);
  }
  ByteReader r(plain.value());
  Bytes new_enc = r.raw(crypto::kSymmetricKeyLen);
  Bytes new_mac = r.raw(crypto::kSymmetricKeyLen);
  if (!r.done()) return apdu::status(apdu::kSwWrongData);
  SecurityDomain* domain = selected_domain();
  domain->s_enc = crypto::SymmetricKey{crypto::KeyPurpose::ENC, std::move(new_enc)};
  domain->s_mac = crypto::SymmetricKey{crypto::KeyPurpose::MAC, std::move(new_mac)};
  close_session();
  return apdu::status(apdu::kSwOk);
}

apdu::ApduResponse SecureElement::handle_verify_pin(const ApduCommand& cmd) {
  EidApplet* app = selected_applet();
  if (!app) return apdu::status(apdu::kSwConditionsNotSatisfied);
  if (app->state == AppletState::BLOCKED) return apdu::status(apdu::kSwBlocked);
  if (app->state != AppletState::PERSONALIZED)
    return apdu::status(apdu::kSwConditionsNotSatisfied);

  std::string digits = to_string(cmd.data);
  if (pin_hash(app->pin.salt, digits) == app->pin.hash) {
    app->access_unlocked = true;
    app->pin.retry_counter = 3;
    return apdu::status(apdu::kSwOk);
  }
  if (--app->pin.retry_counter <= 0) {
    app->pin.retry_counter = 0;
    app->state = AppletState::BLOCKED;
    app->access_unlocked = false;
    return apdu::status(apdu::kSwBlocked);
  }
  return apdu::status(apdu::sw_tries_remaining(app->pin.retry_counter));
}

apdu::ApduResponse SecureElement::handle_personalize(const ApduCommand& cmd) {
  EidApplet* app = selected_applet();
  if (!app) return apdu::status(apdu::kSwConditionsNotSatisfied);
  if (app->state != AppletState::INSTALLED)
    return apdu::status(apdu::kSwConditionsNotSatisfied);
  auto payload = PersonalizePayload::decode(cmd.data);
  if (!payload || !valid_pin_format(payload->pin_digits))
    return apdu::status(apdu::kSwWrongData);

  crypto::KeyPair qr_kp;
  try {
    qr_kp = crypto::keypair_from_private(crypto::GroupId::X25519, payload->qr_private);
  } catch (const Error&) {
    return apdu::status(apdu::kSwWrongData);
  }
  auto plain = crypto::hybrid_open(qr_kp, payload->token_package, to_bytes("token-package"));
  if (!plain) return apdu::status(apdu::kSwWrongData);
  auto package = TokenPackagePlain::decode(*plain);
  if (!package) return apdu::status(apdu::kSwWrongData);

  crypto::KeyPair chip_kp;
  try {
    chip_kp = crypto::keypair_from_private(crypto::GroupId::X25519, package->chip_private);
  } catch (const Error&) {
    return apdu::status(apdu::kSwWrongData);
  }
  auto leaf = pki::verify_chain(app->csca_anchor, package->chip_chain, *clock_);
  if (!leaf || leaf.value().role != pki::Role::CHIP ||
      leaf.value().public_part != chip_kp.public_part) {
    return apdu::status(apdu::kSwWrongData);
  }

  EidApplet backup = *app;
  app->chip_ca_keypair = std::move(chip_kp);
  app->chip_chain = package->chip_chain;
  app->pin.salt = rng_->bytes(8);
  app->pin.hash = pin_hash(app->pin.salt, payload->pin_digits);
  app->pin.retry_counter = 3;
  app->token_key = crypto::random_symmetric_key(crypto::KeyPurpose::TOKEN, *rng_);
  if (secret_log_) secret_log_->push_back(app->token_key->bytes);
  app->state = AppletState::PERSONALIZED;
  if (persisted_size() > storage_budget_bytes) {
    *app = std::move(backup);
    return apdu::status(apdu::kSwInsufficientSpace);
  }

  // The token is encrypted for external storage and the plaintext dropped;
  // the SE keeps only the key.
  crypto::AeadCiphertext blob =
      crypto::aead_encrypt(*app->token_key, crypto::make_nonce('T', 'K', 0, 0),
                           package->token.encode(), to_bytes("token"), *nonces_);
  ApduResponse resp;
  resp.data = blob.serialize();
  return resp;
}

apdu::ApduResponse SecureElement::handle_load_token(const ApduCommand& cmd) {
  EidApplet* app = selected_applet();
  if (!app) return apdu::status(apdu::kSwConditionsNotSatisfied);
  if (app->state != AppletState::PERSONALIZED || !app->access_unlocked)
    return apdu::status(apdu::kSwSecurityStatus);
  auto ct = crypto::AeadCiphertext::parse(cmd.data);
  if (!ct) return apdu::status(apdu::kSwWrongData);
  auto plain = crypto::aead_decrypt(*app->token_key, *ct, to_bytes("token"));
  if (!plain) return apdu::status(apdu::kSwWrongData);
  auto token = EidToken::decode(*plain);
  if (!token) return apdu::status(apdu::kSwWrongData);
  app->transient_token = std::move(*token);
  ApduResponse resp;
  if (debug_leak_attributes) resp.data = app->transient_token->encode();
  return resp;
}

apdu::ApduResponse SecureElement::handle_set_consent(const ApduCommand& cmd) {
  EidApplet* app = selected_applet();
  if (!app) return apdu::status(apdu::kSwConditionsNotSatisfied);
  if (!app->eac_responder || !app->eac_responder->ta_done())
    return apdu::status(apdu::kSwConditionsNotSatisfied);
  ByteReader r(cmd.data);
  auto approved = decode_attribute_set(r);
  if (!approved || !r.at_end()) return apdu::status(apdu::kSwWrongData);
  const auto& allowed = app->eac_responder->terminal_leaf()->attributes_allowed;
  for (const auto& name : *approved) {
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
      return apdu::status(apdu::kSwWrongData);
  }
  app->consent_approved = std::move(*approved);
  return apdu::status(apdu::kSwOk);
}

apdu::ApduResponse SecureElement::handle_get_ta_info() {
  EidApplet* app = selected_applet();
  if (!app || !app->eac_responder || !app->eac_responder->ta_done())
    return apdu::status(apdu::kSwConditionsNotSatisfied);
  const auto& leaf = *app->eac_responder->terminal_leaf();
  ByteWriter w;
  w.str(leaf.subject_id);
  w.u32(static_cast<std::uint32_t>(leaf.attributes_allowed.size()));
  for (const auto& a : leaf.attributes_allowed) w.str(a);
  ApduResponse resp;
  resp.data = w.take();
  return resp;
}

apdu::ApduResponse SecureElement::handle_lock_access() {
  EidApplet* app = selected_applet();
  if (app) {
    app->access_unlocked = false;
    app->transient_token.reset();
    app->eac_responder.reset();
    app->sm.reset();
    app->consent_approved.reset();
  }
  return apdu::status(apdu::kSwOk);
}

apdu::ApduResponse SecureElement::handle_eac_step(const ApduCommand& cmd) {
  EidApplet* app = selected_applet();
  if (!app) return apdu::status(apdu::kSwConditionsNotSatisfied);
  if (app->state != AppletState::PERSONALIZED || !app->access_unlocked)
    return apdu::status(apdu::kSwSecurityStatus);
  auto msg = eac::Message::decode(cmd.data);
  if (!msg) return apdu::status(apdu::kSwWrongData);
  if (msg->type == eac::MsgType::TaRequest) {
    app->eac_responder.emplace(app->cvca_anchor, app->chip_ca_keypair, app->chip_chain, clock_,
                               rng_, secret_log_);
    app->sm.reset();
  }
  if (!app->eac_responder) return apdu::status(apdu::kSwConditionsNotSatisfied);
  eac::Message reply = app->eac_responder->handle(*msg);
  if (app->eac_responder->ca_done() && !app->sm) {
    app->sm.emplace(*app->eac_responder->session_keys(), /*is_initiator=*/false);
  }
  ApduResponse resp;
  resp.data = reply.encode();
  return resp;
}

apdu::ApduResponse SecureElement::handle_secure_message(const ApduCommand& cmd) {
  EidApplet* app = selected_applet();
  if (!app) return apdu::status(apdu::kSwConditionsNotSatisfied);
  if (!app->sm) return apdu::status(apdu::kSwSecurityStatus);
  auto inner_bytes = app->sm->unwrap(cmd.data);
  if (!inner_bytes) {
    ByteWriter w;
    w.u16(static_cast<std::uint16_t>(inner_bytes.error()));
    ApduResponse resp;
    resp.data = w.take();
    resp.sw = apdu::kSwWrongData;
    return resp;
  }
  auto inner = ApduCommand::parse(inner_bytes.value());
  ApduResponse inner_resp =
      inner ? handle_inner_command(*inner) : apdu::status(apdu::kSwWrongData);
  ApduResponse resp;
  resp.data = app->sm->wrap(inner_resp.encode(), *nonces_);
  return resp;
}

apdu::ApduResponse SecureElement::handle_inner_command(const ApduCommand& inner) {
  EidApplet* app = selected_applet();
  if (inner.ins != apdu::kInsGetAttributes)
    return apdu::status(apdu::kSwConditionsNotSatisfied);
  if (!app->transient_token || !app->consent_approved)
    return apdu::status(apdu::kSwConditionsNotSatisfied);
  std::map<std::string, std::string> released;
  for (const auto& name : *app->consent_approved) {
    if (auto value = app->transient_token->attribute(name)) released[name] = *value;
  }
  ApduResponse resp;
  resp.data = encode_attribute_map(released);
  return resp;
}

Bytes SecureElement::serialize_persistent_state() const {
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(domains_.size()));
  for (const auto& d : domains_) {
    w.bytes(d.aid);
    w.u8(static_cast<std::uint8_t>(d.owner));
    w.raw(d.s_enc.bytes);
    w.raw(d.s_mac.bytes);
    w.u8(d.dap_public ? 1 : 0);
    if (d.dap_public) w.bytes(*d.dap_public);
    w.bytes(d.install_params);
    w.u16(static_cast<std::uint16_t>(d.applets.size()));
    for (const auto& a : d.applets) {
      w.bytes(a.aid);
      w.u8(static_cast<std::uint8_t>(a.state));
      w.bytes(a.pin.salt);
      w.bytes(a.pin.hash);
      w.u8(static_cast<std::uint8_t>(a.pin.retry_counter));
      w.bytes(a.cvca_anchor.certificate.encode());
      w.bytes(a.csca_anchor.certificate.encode());
      w.u8(a.chip_ca_keypair.private_part.empty() ? 0 : 1);
      w.bytes(a.chip_ca_keypair.private_part);
      w.bytes(a.chip_ca_keypair.public_part);
      w.bytes(a.chip_chain.encode());
      w.u8(a.token_key ? 1 : 0);
      if (a.token_key) w.raw(a.token_key->bytes);
      w.u64(a.package_size);
    }
  }
  return w.take();
}

HostChannel::HostChannel(crypto::SymmetricKey s_enc, crypto::SymmetricKey s_mac)
    : s_enc_(std::move(s_enc)), s_mac_(std::move(s_mac)) {}

apdu::ApduCommand HostChannel::initialize_update(Rng& rng) {
  host_challenge_ = crypto::make_challenge(rng).bytes;
  session_.reset();
  confirmed_ = false;
  ApduCommand cmd;
  cmd.cla = apdu::kClaProprietary;
  cmd.ins = apdu::kInsInitializeUpdate;
  cmd.data = host_challenge_;
  return cmd;
}

bool HostChannel::absorb_init_response(const apdu::ApduResponse& resp) {
  if (!resp.ok() || resp.data.size() != crypto::kChallengeLen + crypto::kMacLen) return false;
  card_challenge_.assign(resp.data.begin(), resp.data.begin() + crypto::kChallengeLen);
  Bytes cryptogram(resp.data.begin() + crypto::kChallengeLen, resp.data.end());
  crypto::SessionKeys keys =
      crypto::derive_session_keys(s_enc_, s_mac_, host_challenge_, card_challenge_);
  if (!crypto::mac_verify(keys.mac, concat({host_challenge_, card_challenge_}), cryptogram))
    return false;
  session_ = std::move(keys);
  confirmed_ = true;
  return true;
}

apdu::ApduCommand HostChannel::external_authenticate() {
  if (!session_) throw Error(Err::EacStateError, "no session derived");
  ApduCommand cmd;
  cmd.cla = apdu::kClaProprietary;
  cmd.ins = apdu::kInsExternalAuthenticate;
  cmd.data = crypto::mac(session_->mac, concat({card_challenge_, host_challenge_}));
  return cmd;
}

Bytes HostChannel::wrap_command_data(BytesView inner, const apdu::ApduCommand& header,
                                     crypto::NonceRegistry& nonces) {
  if (!session_) throw Error(Err::EacStateError, "no session derived");
  crypto::AeadCiphertext ct = crypto::aead_encrypt(
      session_->enc, gp_nonce(session_->counter), inner, header.header(), nonces);
  ++session_->counter;
  return ct.serialize();
}

}  // namespace meid::se
