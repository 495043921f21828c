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

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "meid/crypto.hpp"
#include "meid/eac.hpp"
#include "meid/errors.hpp"
#include "meid/pki.hpp"
#include "meid/secure_element.hpp"
#include "meid/token.hpp"

namespace meid {

struct World;

namespace host {
struct TcToken;
}

namespace actors {

// Actor ids used in envelopes.
inline constexpr const char* kHostId = "host";
inline constexpr const char* kTeeId = "tee";
inline constexpr const char* kSeId = "se";
inline constexpr const char* kIssuerId = "issuer-remote";
inline constexpr const char* kTsmId = "tsm-remote";
inline constexpr const char* kSpId = "sp-remote";
inline constexpr const char* kServerId = "eid-server";
inline constexpr const char* kOffererId = "offerer-1";
inline constexpr const char* kAdversaryId = "adversary";

// Message tags. Requests from the host poll the remote state machines one
// step at a time; APDUs towards the SE always transit the host.
enum class MsgTag : std::uint8_t {
  SsdRequest = 0x01,        // host -> tsm {se_id}
  ProvisionPoll = 0x02,     // host -> issuer {ticket}
  ProvisionApduResult = 0x03,
  TsmPoll = 0x04,
  TsmApduResult = 0x05,
  TsmDeploy = 0x06,
  PersonalizeForward = 0x07,  // host -> tsm {sealed upload}
  AuthStart = 0x10,
  EacPoll = 0x11,
  EacApduResult = 0x12,
  ConsentReady = 0x13,
  TcTokenRequest = 0x20,
  // server-side (pair-key wrapped on the wire)
  SsdForward = 0x40,       // tsm -> issuer
  TsmKeysHandoff = 0x41,   // issuer -> tsm
  SpPersonalize = 0x42,    // tsm -> sp
  SpToken = 0x43,          // sp -> tsm
  DeliverAttributes = 0x44,  // server -> offerer
  DeliverAck = 0x45,
  Ack = 0x46,
  // replies towards the host
  SsdTicket = 0x81,
  ApduForSe = 0x82,
  ProvisionDone = 0x83,
  TsmStageDone = 0x85,
  TokenPackageMsg = 0x86,
  AuthAck = 0x90,
  EacHandshakeDone = 0x91,
  AuthDone = 0x94,
  AuthFail = 0x95,
  TcTokenMsg = 0xA0,
  ErrorMsg = 0x7F,
};

struct Msg {
  MsgTag tag = MsgTag::ErrorMsg;
  Bytes body;

  Bytes encode() const;
  static std::optional<Msg> decode(BytesView b);
};

Msg error_msg(Err code);
std::optional<Err> msg_error(const Msg& m);

struct TokenPackage {
  Bytes sealed;  // hybrid blob to the citizen's QR public key
};

struct QrLetter {
  crypto::KeyPair qr_keypair;
  std::string document_number;
  std::string qr_payload() const;
};

struct CitizenRecord {
  EidToken token;
  Bytes card_pin_proof;
  Bytes qr_public;
};

/// Append-only set of document numbers already used for an initialization.
class Registry {
 public:
  bool contains(const std::string& document_number) const;
  void add(const std::string& document_number);
  std::size_t size() const { return used_.size(); }

 private:
  std::set<std::string> used_;
};

/// Secure element manufacturer. Knows the static keys of every issued SE and
/// drives SSD installation through its secure channel.
class Issuer {
 public:
  struct SeRecord {
    Bytes isd_aid;
    crypto::SymmetricKey s_enc;
    crypto::SymmetricKey s_mac;
  };

  Bytes handle(World& world, BytesView request);

  std::map<std::string, SeRecord> manufactured;
  /// Initial TSM keys per ticket, kept for the issuer-lockout checks.
  std::map<std::uint32_t, std::pair<crypto::SymmetricKey, crypto::SymmetricKey>> issued_keys;

 private:
  struct Session {
    enum class Stage { SelectSent, InitSent, AuthSent, InstallSent, Done, Failed };
    std::uint32_t ticket = 0;
    std::string se_id;
    Bytes tsm_aid;
    Bytes dap_public;
    std::optional<se::HostChannel> channel;
    crypto::SymmetricKey new_enc;
    crypto::SymmetricKey new_mac;
    std::deque<apdu::ApduCommand> pending;
    Stage stage = Stage::SelectSent;
  };
  Msg handle_msg(World& world, const Msg& m);
  Msg advance(World& world, Session& s, const apdu::ApduResponse& resp);
  std::map<std::uint32_t, Session> sessions_;
};

/// Trusted service manager: rotates its domain keys after installation and
/// deploys the DAP-signed eID applet; also the host's conduit to the SP.
class Tsm {
 public:
  Bytes handle(World& world, BytesView request);

  Bytes tsm_aid;
  Bytes applet_aid;
  crypto::KeyPair dap_keypair;
  pki::Certificate cvca_cert;  // embedded into the applet package
  pki::Certificate csca_cert;
  /// Current domain keys (rotated away from the issuer-issued ones).
  std::optional<crypto::SymmetricKey> current_enc;
  std::optional<crypto::SymmetricKey> current_mac;

 private:
  struct Session {
    enum class Stage {
      AwaitKeys, KeysReady,
      RotateSelectSent, RotateInitSent, RotateAuthSent, RotatePutSent, RotateDone,
      DeploySelectSent, DeployInitSent, DeployAuthSent, DeployInstallSent,
      Done, Failed
    };
    std::string se_id;
    std::optional<crypto::SymmetricKey> initial_enc;
    std::optional<crypto::SymmetricKey> initial_mac;
    std::optional<se::HostChannel> channel;
    crypto::SymmetricKey next_enc;
    crypto::SymmetricKey next_mac;
    std::deque<apdu::ApduCommand> pending;
    Stage stage = Stage::AwaitKeys;
  };
  Msg handle_msg(World& world, const Msg& m);
  Msg advance(World& world, Session& s, const apdu::ApduResponse& resp);
  std::map<std::uint32_t, Session> sessions_;
  std::uint32_t next_ticket_ = 1;
};

/// Sovereign service provider: validates captured documents against the
/// provisioned records, enforces the clone-prevention registry and issues
/// token packages sealed to the citizen's QR key.
class ServiceProvider {
 public:
  Bytes handle(World& world, BytesView request);
  Outcome<TokenPackage> personalize(World& world, const CapturedDocument& captured);

  crypto::KeyPair enc_keypair;  // uploads are sealed to this
  crypto::KeyPair ds_keypair;
  pki::Certificate ds_cert;
  pki::Certificate csca_cert;
  std::map<std::string, CitizenRecord> provisioned;  // by document number
  Registry registry;
};

/// EAC initiator side plus the delivery hop to the offerer.
class EidServer {
 public:
  Bytes handle(World& world, BytesView request);

  crypto::KeyPair terminal_keypair;
  pki::CertChain terminal_chain;
  std::vector<std::string> terminal_attributes;  // leaf attributes_allowed
  pki::TrustAnchor csca_anchor;

  bool ta_ok_last = false;
  bool ca_ok_last = false;

 private:
  struct AuthSession {
    enum class Stage { Handshake, AwaitConsent, SmSent, Done, Failed };
    std::set<std::string> required;
    Bytes offerer_session_id;
    std::optional<eac::Initiator> initiator;
    std::optional<eac::SecureMessaging> sm;
    std::deque<apdu::ApduCommand> pending;
    Stage stage = Stage::Handshake;
  };
  Msg handle_msg(World& world, const Msg& m);
  Msg advance(World& world, AuthSession& s, const apdu::ApduResponse& resp);
  void queue_eac(AuthSession& s, const eac::Message& msg);
  std::map<Bytes, AuthSession> sessions_;
};

/// The relying party: names the attributes it needs and records what the eID
/// server delivers per session.
class Offerer {
 public:
  Bytes handle(World& world, BytesView request);
  host::TcToken create_tc_token(World& world);

  std::set<std::string> required_attributes;
  std::map<Bytes, std::optional<std::map<std::string, std::string>>> sessions;
};

}  // namespace actors
}  // namespace meid
