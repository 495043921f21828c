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
#include <vector>

#include "meid/apdu.hpp"
#include "meid/crypto.hpp"
#include "meid/eac.hpp"
#include "meid/pki.hpp"
#include "meid/token.hpp"

namespace meid::se {

// The software secure element: APDU dispatch, issuer/TSM security domains
// with challenge-response secure channels, DAP-verified applet installation
// and the eID applet (PIN, personalization, token handling, EAC responder).

struct PinState {
  Bytes salt;
  Bytes hash;  // sha256(salt || digits)
  int retry_counter = 3;
};

enum class AppletState : std::uint8_t { INSTALLED = 1, PERSONALIZED = 2, BLOCKED = 3 };

struct EidApplet {
  Bytes aid;
  AppletState state = AppletState::INSTALLED;
  PinState pin;
  bool access_unlocked = false;

  pki::TrustAnchor cvca_anchor;
  pki::TrustAnchor csca_anchor;
  crypto::KeyPair chip_ca_keypair;  // private part never leaves the SE
  pki::CertChain chip_chain;        // CSCA -> DS -> CHIP
  std::optional<crypto::SymmetricKey> token_key;
  std::size_t package_size = 0;  // installed package footprint

  // Per-EAC-session transient state, wiped by lock_access().
  std::optional<eac::Responder> eac_responder;
  std::optional<eac::SecureMessaging> sm;
  std::optional<std::set<std::string>> consent_approved;
  std::optional<EidToken> transient_token;
};

enum class DomainOwner : std::uint8_t { ISSUER = 1, TSM = 2 };

struct SecurityDomain {
  Bytes aid;  // 5..16 bytes, unique within the SE
  DomainOwner owner = DomainOwner::ISSUER;
  crypto::SymmetricKey s_enc;
  crypto::SymmetricKey s_mac;
  std::optional<Bytes> dap_public;
  Bytes install_params;
  std::vector<EidApplet> applets;
};

enum class ChannelState : std::uint8_t { INIT_UPDATED = 1, AUTHENTICATED = 2, CLOSED = 3 };

struct SecureChannelSession {
  Bytes domain_aid;
  crypto::SessionKeys keys;
  ChannelState state = ChannelState::CLOSED;
  Bytes host_challenge;
  Bytes card_challenge;
};

/// Payload layouts for the protected management commands. The byte formats
/// are shared with the host-side actors.
struct InstallSsdPayload {
  Bytes aid;
  crypto::SymmetricKey s_enc;
  crypto::SymmetricKey s_mac;
  Bytes dap_public;
  Bytes params;

  Bytes encode() const;
  static std::optional<InstallSsdPayload> decode(BytesView b);
};

struct AppletPackage {
  Bytes aid;
  pki::Certificate cvca_cert;
  pki::Certificate csca_cert;

  Bytes encode() const;
  static std::optional<AppletPackage> decode(BytesView b);
};

struct InstallAppletPayload {
  Bytes package;  // AppletPackage encoding, the bytes the DAP signature covers
  Bytes dap_signature;

  Bytes encode() const;
  static std::optional<InstallAppletPayload> decode(BytesView b);
};

struct PersonalizePayload {
  Bytes token_package;  // hybrid blob sealed to the QR public key
  Bytes qr_private;
  std::string pin_digits;

  Bytes encode() const;
  static std::optional<PersonalizePayload> decode(BytesView b);
};

struct TokenPackagePlain {
  EidToken token;
  Bytes chip_private;
  pki::CertChain chip_chain;

  Bytes encode() const;
  static std::optional<TokenPackagePlain> decode(BytesView b);
};

class SecureElement {
 public:
  SecureElement(std::string se_id, Rng* rng, const std::uint64_t* clock,
                crypto::NonceRegistry* nonces, std::vector<Bytes>* secret_log = nullptr);

  /// Manufacturing step: pre-installs the issuer security domain.
  void install_issuer_domain(Bytes aid, crypto::SymmetricKey s_enc, crypto::SymmetricKey s_mac);

  /// Single APDU entry point; handles command chaining internally.
  apdu::ApduResponse process(const apdu::ApduCommand& cmd);

  // Introspection for the world builder, flows and tests.
  const std::string& se_id() const { return se_id_; }
  const SecurityDomain* find_domain(BytesView aid) const;
  const EidApplet* find_applet(BytesView aid) const;
  EidApplet* mutable_applet(BytesView aid);
  const std::optional<SecureChannelSession>& session() const { return session_; }

  /// Canonical encoding of everything the SE persists; its size is the
  /// storage accounting the budget applies to.
  Bytes serialize_persistent_state() const;
  std::size_t persisted_size() const { return serialize_persistent_state().size(); }

  std::size_t storage_budget_bytes = 8192;
  /// Test hook (positive control for the confidentiality scan): echo the
  /// decrypted attributes in the load-token response.
  bool debug_leak_attributes = false;

 private:
  apdu::ApduResponse dispatch(const apdu::ApduCommand& cmd);
  apdu::ApduResponse handle_select(const apdu::ApduCommand& cmd);
  apdu::ApduResponse handle_initialize_update(const apdu::ApduCommand& cmd);
  apdu::ApduResponse handle_external_authenticate(const apdu::ApduCommand& cmd);
  apdu::ApduResponse handle_install(const apdu::ApduCommand& cmd);
  apdu::ApduResponse handle_install_ssd(BytesView plain);
  apdu::ApduResponse handle_install_applet(SecurityDomain& domain, BytesView plain);
  apdu::ApduResponse handle_put_key(const apdu::ApduCommand& cmd);
  apdu::ApduResponse handle_verify_pin(const apdu::ApduCommand& cmd);
  apdu::ApduResponse handle_personalize(const apdu::ApduCommand& cmd);
  apdu::ApduResponse handle_load_token(const apdu::ApduCommand& cmd);
  apdu::ApduResponse handle_set_consent(const apdu::ApduCommand& cmd);
  apdu::ApduResponse handle_get_ta_info();
  apdu::ApduResponse handle_lock_access();
  apdu::ApduResponse handle_eac_step(const apdu::ApduCommand& cmd);
  apdu::ApduResponse handle_secure_message(const apdu::ApduCommand& cmd);
  apdu::ApduResponse handle_inner_command(const apdu::ApduCommand& inner);

  SecurityDomain* selected_domain();
  EidApplet* selected_applet();
  /// Decrypts a secure-channel protected command body; requires an
  /// AUTHENTICATED session on the selected domain.
  Outcome<Bytes> unwrap_protected(const apdu::ApduCommand& cmd);
  void close_session();
  bool fits_budget(std::size_t additional) const;

  std::string se_id_;
  Rng* rng_;
  const std::uint64_t* clock_;
  crypto::NonceRegistry* nonces_;
  std::vector<Bytes>* secret_log_ = nullptr;

  std::vector<SecurityDomain> domains_;
  std::optional<SecureChannelSession> session_;
  Bytes selected_aid_;

  // command-chaining accumulator
  std::optional<apdu::ApduCommand> chain_head_;
  Bytes chain_data_;
};

/// Host-side mirror of the SE secure channel: same key derivation, verifies
/// the card cryptogram, produces the host cryptogram, wraps protected bodies.
class HostChannel {
 public:
  HostChannel(crypto::SymmetricKey s_enc, crypto::SymmetricKey s_mac);

  apdu::ApduCommand initialize_update(Rng& rng);
  /// Consumes the INITIALIZE UPDATE response; false when the card cryptogram
  /// does not verify under our static keys (wrong or rotated keys).
  bool absorb_init_response(const apdu::ApduResponse& resp);
  apdu::ApduCommand external_authenticate();
  /// AEAD-protects an inner payload for a command with the given header.
  Bytes wrap_command_data(BytesView inner, const apdu::ApduCommand& header,
                          crypto::NonceRegistry& nonces);
  bool authenticated() const { return session_.has_value() && confirmed_; }

 private:
  crypto::SymmetricKey s_enc_;
  crypto::SymmetricKey s_mac_;
  Bytes host_challenge_;
  Bytes card_challenge_;
  std::optional<crypto::SessionKeys> session_;
  bool confirmed_ = false;
};

}  // namespace meid::se
