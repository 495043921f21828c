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

#include "meid/tee.hpp"

#include <algorithm>

#include "meid/secure_element.hpp"
#include "meid/world.hpp"

namespace meid::tee {

Outcome<AttributeConsent> consent_intersect(const std::set<std::string>& requested,
                                            const std::set<std::string>& scripted_choice,
                                            const std::set<std::string>& allowed) {
  for (const auto& name : requested) {
    if (!allowed.count(name)) return Err::RequestExceedsCertificate;
  }
  AttributeConsent out;
  out.requested = requested;
  std::set_intersection(requested.begin(), requested.end(), scripted_choice.begin(),
                        scripted_choice.end(), std::inserter(out.approved, out.approved.end()));
  return out;
}

Outcome<apdu::ApduResponse> Tee::monitor_call(World& world, const MonitorCall& call) {
  if (call.secure_input && call.origin != Origin::SECURE_WORLD) return Err::RoutingError;
  return world.tee_apdu(call.request);
}

Outcome<apdu::ApduResponse> Tee::forward_apdu(World& world, const apdu::ApduCommand& cmd) {
  MonitorCall call{Origin::NORMAL_WORLD, /*secure_input=*/false, cmd};
  return monitor_call(world, call);
}

Outcome<apdu::ApduResponse> Tee::secure_pin_entry(World& world, const std::string& digits) {
  apdu::ApduCommand cmd;
  cmd.cla = apdu::kClaIso;
  cmd.ins = apdu::kInsVerifyPin;
  cmd.data = to_bytes(digits);
  MonitorCall call{Origin::SECURE_WORLD, /*secure_input=*/true, std::move(cmd)};
  return monitor_call(world, call);
}

Outcome<Bytes> Tee::personalize_via_qr(World& world, BytesView token_package,
                                       const std::string& scripted_qr_payload,
                                       const std::string& pin_digits) {
  auto qr_private = decode_qr_payload(scripted_qr_payload);
  if (!qr_private) return qr_private.error();

  se::PersonalizePayload payload;
  payload.token_package.assign(token_package.begin(), token_package.end());
  payload.qr_private = qr_private.value();
  payload.pin_digits = pin_digits;
  // The payload exceeds a short APDU, so it crosses the monitor as a chain.
  auto resp = world.tee_apdu_large(apdu::kClaProprietary, apdu::kInsPersonalize, 0, 0,
                                   payload.encode());
  if (!resp) return resp.error();
  if (!resp.value().ok()) return Err::ApduError;
  return resp.value().data;
}

Outcome<AttributeConsent> Tee::capture_consent(World& world,
                                               const std::set<std::string>& requested,
                                               const std::set<std::string>& scripted_choice) {
  apdu::ApduCommand info_cmd;
  info_cmd.cla = apdu::kClaProprietary;
  info_cmd.ins = apdu::kInsGetTaInfo;
  auto info = world.tee_apdu(info_cmd);
  if (!info) return info.error();
  if (!info.value().ok()) return Err::ApduError;
  ByteReader r(info.value().data);
  r.str();  // terminal subject id (displayed to the user in a real TEE)
  std::uint32_t n = r.u32();
  std::set<std::string> allowed;
  for (std::uint32_t i = 0; i < n && r.ok(); ++i) allowed.insert(r.str());
  if (!r.done()) return Err::ParseError;

  auto consent = consent_intersect(requested, scripted_choice, allowed);
  if (!consent) return consent;

  apdu::ApduCommand set_cmd;
  set_cmd.cla = apdu::kClaProprietary;
  set_cmd.ins = apdu::kInsSetConsent;
  set_cmd.data = encode_attribute_set(consent.value().approved);
  MonitorCall call{Origin::SECURE_WORLD, /*secure_input=*/true, std::move(set_cmd)};
  auto resp = monitor_call(world, call);
  if (!resp) return resp.error();
  if (!resp.value().ok()) return Err::ApduError;
  return consent;
}

std::string encode_qr_payload(BytesView private_part) {
  return "QR1:" + hex_encode(private_part);
}

Outcome<Bytes> decode_qr_payload(const std::string& payload) {
  if (payload.rfind("QR1:", 0) != 0) return Err::MalformedQr;
  auto bytes = hex_decode(payload.substr(4));
  if (!bytes || bytes->size() != crypto::kPrivateKeyLen) return Err::MalformedQr;
  return *bytes;
}

}  // namespace meid::tee
