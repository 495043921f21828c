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

#include "meid/bytes.hpp"
#include "meid/crypto.hpp"
#include "meid/errors.hpp"

namespace meid::pki {

// Two card-verifiable-style hierarchies: CVCA -> DV -> TERMINAL for the
// server side and CSCA -> DS -> CHIP for the chip side. Chains must descend
// strictly within one hierarchy.
enum class Role : std::uint8_t {
  CVCA = 1,
  DV = 2,
  TERMINAL = 3,
  CSCA = 4,
  DS = 5,
  CHIP = 6,
};

const char* role_name(Role r);
std::optional<Role> parent_role(Role r);
bool is_root(Role r);

struct Certificate {
  std::string subject_id;
  Role role = Role::CVCA;
  crypto::GroupId key_group = crypto::GroupId::Ed25519;  // algorithm of public_part
  Bytes public_part;
  std::uint64_t not_before = 0;
  std::uint64_t not_after = 0;
  std::string issuer_id;
  std::vector<std::string> attributes_allowed;  // sorted; TERMINAL role only
  Bytes signature;

  /// Canonical encoding of everything the signature covers.
  Bytes to_be_signed() const;
  Bytes encode() const;
  static std::optional<Certificate> decode(BytesView b);

  bool operator==(const Certificate& o) const = default;
};

struct CertChain {
  std::vector<Certificate> certs;  // root first

  Bytes encode() const;
  static std::optional<CertChain> decode(BytesView b);
};

struct TrustAnchor {
  Certificate certificate;  // self-signed CVCA or CSCA
};

struct VerifiedLeaf {
  std::string subject_id;
  Role role = Role::CVCA;
  crypto::GroupId key_group = crypto::GroupId::Ed25519;
  Bytes public_part;
  std::vector<std::string> attributes_allowed;
};

/// Creates a self-signed root certificate and wraps it as an anchor.
TrustAnchor make_root(const crypto::KeyPair& keypair, const std::string& subject_id, Role role,
                      std::uint64_t not_before, std::uint64_t not_after);

Outcome<Certificate> issue_certificate(const crypto::KeyPair& issuer_keypair,
                                       const Certificate& issuer_cert,
                                       const std::string& subject_id,
                                       crypto::GroupId subject_key_group,
                                       BytesView subject_public, Role role,
                                       std::uint64_t not_before, std::uint64_t not_after,
                                       std::vector<std::string> attributes_allowed = {});

/// Accepts iff chain[0] equals the anchor certificate, every link verifies
/// under its parent, roles descend strictly within one hierarchy and
/// check_time lies inside every validity window. Checks run in that order,
/// per link: signature, role order, validity.
Outcome<VerifiedLeaf> verify_chain(const TrustAnchor& anchor, const CertChain& chain,
                                   std::uint64_t check_time);

}  // namespace meid::pki
