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

#include "meid/errors.hpp"

namespace meid {

const char* err_name(Err e) {
  switch (e) {
    case Err::None: return "None";
    case Err::UnknownGroup: return "UnknownGroup";
    case Err::GroupMismatch: return "GroupMismatch";
    case Err::InvalidElement: return "InvalidElement";
    case Err::NonceReuse: return "NonceReuse";
    case Err::AuthFailure: return "AuthFailure";
    case Err::WrongKeyPurpose: return "WrongKeyPurpose";
    case Err::BadChallengeLength: return "BadChallengeLength";
    case Err::EmptyLabel: return "EmptyLabel";
    case Err::RoleOrderViolation: return "RoleOrderViolation";
    case Err::ValidityOutOfRange: return "ValidityOutOfRange";
    case Err::BadRoot: return "BadRoot";
    case Err::BadSignature: return "BadSignature";
    case Err::Expired: return "Expired";
    case Err::MalformedQr: return "MalformedQr";
    case Err::RequestExceedsCertificate: return "RequestExceedsCertificate";
    case Err::RoutingError: return "RoutingError";
    case Err::UnknownOfferer: return "UnknownOfferer";
    case Err::MissingKey: return "MissingKey";
    case Err::NotInitialized: return "NotInitialized";
    case Err::TeeUnavailable: return "TeeUnavailable";
    case Err::SeUnavailable: return "SeUnavailable";
    case Err::BlobTamper: return "BlobTamper";
    case Err::PinRejected: return "PinRejected";
    case Err::PinBlocked: return "PinBlocked";
    case Err::AlreadyInitialized: return "AlreadyInitialized";
    case Err::ApduError: return "ApduError";
    case Err::UnknownSecureElement: return "UnknownSecureElement";
    case Err::NoSuchDomain: return "NoSuchDomain";
    case Err::DapRejected: return "DapRejected";
    case Err::ValidationFailed: return "ValidationFailed";
    case Err::AlreadyRegistered: return "AlreadyRegistered";
    case Err::SessionUnknown: return "SessionUnknown";
    case Err::TaFailed: return "TaFailed";
    case Err::CaFailed: return "CaFailed";
    case Err::TaChainInvalid: return "TaChainInvalid";
    case Err::TaSignatureInvalid: return "TaSignatureInvalid";
    case Err::CaChainInvalid: return "CaChainInvalid";
    case Err::CaKeyConfirmFailed: return "CaKeyConfirmFailed";
    case Err::CaCommitmentMismatch: return "CaCommitmentMismatch";
    case Err::SmTamper: return "SmTamper";
    case Err::SmReplay: return "SmReplay";
    case Err::EacStateError: return "EacStateError";
    case Err::Dropped: return "Dropped";
    case Err::ParseError: return "ParseError";
    case Err::ConfigError: return "ConfigError";
    case Err::SecurityAssertionFailed: return "SecurityAssertionFailed";
  }
  return "Unknown";
}

Error::Error(Err code, const std::string& detail)
    : std::runtime_error(detail.empty() ? err_name(code)
                                        : std::string(err_name(code)) + ": " + detail),
      code_(code) {}

}  // namespace meid
