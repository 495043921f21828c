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

#include <set>
#include <string>

#include "meid/apdu.hpp"
#include "meid/bytes.hpp"
#include "meid/errors.hpp"

namespace meid {

struct World;

namespace tee {

enum class Origin : std::uint8_t { NORMAL_WORLD = 1, SECURE_WORLD = 2 };

/// A request crossing the world boundary towards the secure element.
/// Secure-input payloads (PIN digits, QR private key) may only originate in
/// the secure world; the monitor rejects anything else.
struct MonitorCall {
  Origin origin = Origin::NORMAL_WORLD;
  bool secure_input = false;
  apdu::ApduCommand request;
};

struct AttributeConsent {
  std::set<std::string> requested;
  std::set<std::string> approved;  // always a subset of requested
};

/// Pure consent rule: approved = requested intersect choice, rejected when the
/// request exceeds what the terminal certificate allows.
Outcome<AttributeConsent> consent_intersect(const std::set<std::string>& requested,
                                            const std::set<std::string>& scripted_choice,
                                            const std::set<std::string>& allowed);

/// The trusted execution environment: secure entry of PIN and QR key,
/// attribute-consent capture, and the monitor bridge to the secure element.
/// The "user" is a scripted input source supplied by the scenario.
class Tee {
 public:
  /// Routes a call to the SE over the TEE_SE channel. Secure-input requests
  /// from the normal world are a routing violation.
  Outcome<apdu::ApduResponse> monitor_call(World& world, const MonitorCall& call);

  /// Normal-world APDU bridge (the host talks to the SE through this).
  Outcome<apdu::ApduResponse> forward_apdu(World& world, const apdu::ApduCommand& cmd);

  /// Scripted PIN entry; the digits travel only TEE -> SE.
  Outcome<apdu::ApduResponse> secure_pin_entry(World& world, const std::string& digits);

  /// Scans the scripted QR payload and drives the personalize command.
  /// Returns the encrypted token blob produced by the applet.
  Outcome<Bytes> personalize_via_qr(World& world, BytesView token_package,
                                    const std::string& scripted_qr_payload,
                                    const std::string& pin_digits);

  /// Captures consent against the terminal certificate bounds recorded by the
  /// applet during TA, then registers the approved set with the applet.
  Outcome<AttributeConsent> capture_consent(World& world,
                                            const std::set<std::string>& requested,
                                            const std::set<std::string>& scripted_choice);

  bool trustlet_installed = false;
};

/// QR letter payload codec ("QR1:" + hex of the private key).
std::string encode_qr_payload(BytesView private_part);
Outcome<Bytes> decode_qr_payload(const std::string& payload);

}  // namespace tee
}  // namespace meid
