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

#include <cassert>
#include <stdexcept>
#include <string>
#include <variant>

namespace meid {

enum class Err : std::uint16_t {
  None = 0,
  // crypto
  UnknownGroup,
  GroupMismatch,
  InvalidElement,
  NonceReuse,
  AuthFailure,
  WrongKeyPurpose,
  BadChallengeLength,
  EmptyLabel,
  // pki
  RoleOrderViolation,
  ValidityOutOfRange,
  BadRoot,
  BadSignature,
  Expired,
  // tee
  MalformedQr,
  RequestExceedsCertificate,
  RoutingError,
  // host / flows
  UnknownOfferer,
  MissingKey,
  NotInitialized,
  TeeUnavailable,
  SeUnavailable,
  BlobTamper,
  PinRejected,
  PinBlocked,
  AlreadyInitialized,
  ApduError,
  // remote actors
  UnknownSecureElement,
  NoSuchDomain,
  DapRejected,
  ValidationFailed,
  AlreadyRegistered,
  SessionUnknown,
  TaFailed,
  CaFailed,
  // eac
  TaChainInvalid,
  TaSignatureInvalid,
  CaChainInvalid,
  CaKeyConfirmFailed,
  CaCommitmentMismatch,
  SmTamper,
  SmReplay,
  EacStateError,
  // transport / scenario
  Dropped,
  ParseError,
  ConfigError,
  SecurityAssertionFailed,
};

const char* err_name(Err e);

/// Thrown for contract violations (misuse of an interface, e.g. MAC with an
/// encryption key). Expected protocol failures travel as Outcome values.
class Error : public std::runtime_error {
 public:
  explicit Error(Err code, const std::string& detail = "");
  Err code() const { return code_; }

 private:
  Err code_;
};

/// Value-or-error result for operations whose failure is a normal protocol
/// outcome that callers must branch on.
template <typename T>
class [[nodiscard]] Outcome {
 public:
  Outcome(T value) : v_(std::move(value)) {}  // NOLINT: implicit by design
  Outcome(Err error) : v_(error) { assert(error != Err::None); }

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  const T& value() const {
    assert(ok());
    return std::get<T>(v_);
  }
  T& value() {
    assert(ok());
    return std::get<T>(v_);
  }

  Err error() const { return ok() ? Err::None : std::get<Err>(v_); }

 private:
  std::variant<T, Err> v_;
};

struct Unit {};
using Status = Outcome<Unit>;
inline Status ok_status() { return Status(Unit{}); }

}  // namespace meid
