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
#include <vector>

#include "meid/bytes.hpp"

namespace meid::apdu {

// Short APDUs only: cla | ins | p1 | p2 [| lc | data] [| le]. Payloads over
// 255 bytes are sent via command chaining (cla bit 0x10 on every block but
// the last). Responses are data || sw (big-endian).

inline constexpr std::size_t kMaxData = 255;
inline constexpr std::uint8_t kClaChainBit = 0x10;
inline constexpr std::uint8_t kClaIso = 0x00;
inline constexpr std::uint8_t kClaProprietary = 0x80;

// Status words (ISO 7816-4 style convention; not claiming conformance).
inline constexpr std::uint16_t kSwOk = 0x9000;
inline constexpr std::uint16_t kSwAuthFailed = 0x6300;
inline constexpr std::uint16_t kSwFileNotFound = 0x6A82;
inline constexpr std::uint16_t kSwSecurityStatus = 0x6982;
inline constexpr std::uint16_t kSwBlocked = 0x6983;
inline constexpr std::uint16_t kSwConditionsNotSatisfied = 0x6985;
inline constexpr std::uint16_t kSwWrongData = 0x6A80;
inline constexpr std::uint16_t kSwInsufficientSpace = 0x6A84;

constexpr std::uint16_t sw_tries_remaining(int tries) {
  return static_cast<std::uint16_t>(0x63C0 | (tries & 0x0F));
}

// Instruction bytes understood by the simulated secure element.
inline constexpr std::uint8_t kInsSelect = 0xA4;               // cla 0x00
inline constexpr std::uint8_t kInsInitializeUpdate = 0x50;     // cla 0x80
inline constexpr std::uint8_t kInsExternalAuthenticate = 0x82; // cla 0x80
inline constexpr std::uint8_t kInsInstall = 0xE6;              // p1 0x10 SSD, 0x0C applet
inline constexpr std::uint8_t kInsPutKey = 0xD8;
inline constexpr std::uint8_t kInsVerifyPin = 0x20;            // cla 0x00, TEE only
inline constexpr std::uint8_t kInsPersonalize = 0x2E;          // cla 0x80, TEE only
inline constexpr std::uint8_t kInsLoadToken = 0x2C;
inline constexpr std::uint8_t kInsSetConsent = 0x2A;           // TEE only
inline constexpr std::uint8_t kInsGetTaInfo = 0x28;
inline constexpr std::uint8_t kInsLockAccess = 0x26;
inline constexpr std::uint8_t kInsEacStep = 0x24;
inline constexpr std::uint8_t kInsSecureMessage = 0x36;
inline constexpr std::uint8_t kInsGetAttributes = 0x34;    // only inside secure messaging

inline constexpr std::uint8_t kInstallP1Ssd = 0x10;
inline constexpr std::uint8_t kInstallP1Applet = 0x0C;

struct ApduCommand {
  std::uint8_t cla = 0;
  std::uint8_t ins = 0;
  std::uint8_t p1 = 0;
  std::uint8_t p2 = 0;
  Bytes data;
  std::optional<std::uint8_t> le;

  bool chained() const { return (cla & kClaChainBit) != 0; }
  Bytes header() const { return Bytes{cla, ins, p1, p2}; }
  /// Throws if data exceeds the short-APDU limit.
  Bytes encode() const;
  static std::optional<ApduCommand> parse(BytesView b);

  bool operator==(const ApduCommand& o) const = default;
};

struct ApduResponse {
  Bytes data;
  std::uint16_t sw = kSwOk;

  bool ok() const { return sw == kSwOk; }
  Bytes encode() const;
  static std::optional<ApduResponse> parse(BytesView b);

  bool operator==(const ApduResponse& o) const = default;
};

inline ApduResponse status(std::uint16_t sw) { return ApduResponse{{}, sw}; }

bool is_select(const ApduCommand& cmd);

/// Splits a logical command with arbitrary payload into chained short APDUs.
std::vector<ApduCommand> chain_split(std::uint8_t cla, std::uint8_t ins, std::uint8_t p1,
                                     std::uint8_t p2, BytesView data);

}  // namespace meid::apdu
