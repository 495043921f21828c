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

#include "meid/pki.hpp"

#include <algorithm>

namespace meid::pki {

const char* role_name(Role r) {
  switch (r) {
    case Role::CVCA: return "CVCA";
    case Role::DV: return "DV";
    case Role::TERMINAL: return "TERMINAL";
    case Role::CSCA: return "CSCA";
    case Role::DS: return "DS";
    case Role::CHIP: return "CHIP";
  }
  return "?";
}

std::optional<Role> parent_role(Role r) {
  switch (r) {
    case Role::DV: return Role::CVCA;
    case Role::TERMINAL: return Role::DV;
    case Role::DS: return Role::CSCA;
    case Role::CHIP: return Role::DS;
    case Role::CVCA:
    case Role::CSCA: return std::nullopt;
  }
  return std::nullopt;
}

bool is_root(Role r) { return r == Role::CVCA || r == Role::CSCA; }

Bytes Certificate::to_be_signed() const {
  ByteWriter w;
  w.str(subject_id);
  w.u8(static_cast<std::uint8_t>(role));
  w.u8(static_cast<std::uint8_t>(key_group));
  w.bytes(public_part);
  w.u64(not_before);
  w.u64(not_after);
  w.str(issuer_id);
  w.u32(static_cast<std::uint32_t>(attributes_allowed.size()));
  for (const auto& a : attributes_allowed) w.str(a);
  return w.take();
}

Bytes Certificate::encode() const {
  ByteWriter w;
  w.raw(to_be_signed());
  w.bytes(signature);
  return w.take();
}

static bool decode_into(ByteReader& r, Certificate& c) {
  c.subject_id = r.str();
  c.role = static_cast<Role>(r.u8());
  c.key_group = static_cast<crypto::GroupId>(r.u8());
  c.public_part = r.bytes();
  c.not_before = r.u64();
  c.not_after = r.u64();
  c.issuer_id = r.str();
  std::uint32_t n = r.u32();
  if (!r.ok() || n > 64) return false;
  c.attributes_allowed.clear();
  for (std::uint32_t i = 0; i < n; ++i) c.attributes_allowed.push_back(r.str());
  c.signature = r.bytes();
  return r.ok();
}

std::optional<Certificate> Certificate::decode(BytesView b) {
  ByteReader r(b);
  Certificate c;
  if (!decode_into(r, c) || !r.at_end()) return std::nullopt;
  return c;
}

Bytes CertChain::encode() const {
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(certs.size()));
  for (const auto& c : certs) w.bytes(c.encode());
  return w.take();
}

std::optional<CertChain> CertChain::decode(BytesView b) {
  ByteReader r(b);
  std::uint16_t n = r.u16();
  if (!r.ok() || n > 16) return std::nullopt;
  CertChain chain;
  for (std::uint16_t i = 0; i < n; ++i) {
    auto cert = Certificate::decode(r.bytes());
    if (!cert || !r.ok()) return std::nullopt;
    chain.certs.push_back(std::move(*cert));
  }
  if (!r.done()) return std::nullopt;
  return chain;
}

TrustAnchor make_root(const crypto::KeyPair& keypair, const std::string& subject_id, Role role,
                      std::uint64_t not_before, std::uint64_t not_after) {
  if (!is_root(role)) throw Error(Err::RoleOrderViolation, "anchor must be CVCA or CSCA");
  Certificate c;
  c.subject_id = subject_id;
  c.role = role;
  c.key_group = keypair.group;
  c.public_part = keypair.public_part;
  c.not_before = not_before;
  c.not_after = not_after;
  c.issuer_id = subject_id;
  c.signature = crypto::sign(keypair, c.to_be_signed());
  return TrustAnchor{std::move(c)};
}

Outcome<Certificate> issue_certificate(const crypto::KeyPair& issuer_keypair,
                                       const Certificate& issuer_cert,
                                       const std::string& subject_id,
                                       crypto::GroupId subject_key_group,
                                       BytesView subject_public, Role role,
                                       std::uint64_t not_before, std::uint64_t not_after,
                                       std::vector<std::string> attributes_allowed) {
  auto parent = parent_role(role);
  if (!parent || *parent != issuer_cert.role) return Err::RoleOrderViolation;
  if (not_before < issuer_cert.not_before || not_after > issuer_cert.not_after ||
      not_before > not_after) {
    return Err::ValidityOutOfRange;
  }
  std::sort(attributes_allowed.begin(), attributes_allowed.end());
  Certificate c;
  c.subject_id = subject_id;
  c.role = role;
  c.key_group = subject_key_group;
  c.public_part.assign(subject_public.begin(), subject_public.end());
  c.not_before = not_before;
  c.not_after = not_after;
  c.issuer_id = issuer_cert.subject_id;
  c.attributes_allowed = std::move(attributes_allowed);
  c.signature = crypto::sign(issuer_keypair, c.to_be_signed());
  return c;
}

Outcome<VerifiedLeaf> verify_chain(const TrustAnchor& anchor, const CertChain& chain,
                                   std::uint64_t check_time) {
  if (chain.certs.empty() || !(chain.certs.front() == anchor.certificate)) return Err::BadRoot;

  const Certificate* parent = nullptr;
  for (std::size_t i = 0; i < chain.certs.size(); ++i) {
    const Certificate& cert = chain.certs[i];
    const Bytes& signer_pub = parent ? parent->public_part : cert.public_part;
    crypto::GroupId signer_group = parent ? parent->key_group : cert.key_group;
    if (signer_group != crypto::GroupId::Ed25519 ||
        !crypto::verify(signer_group, signer_pub, cert.to_be_signed(), cert.signature)) {
      return Err::BadSignature;
    }
    if (parent) {
      auto expected_parent = parent_role(cert.role);
      if (!expected_parent || *expected_parent != parent->role ||
          cert.issuer_id != parent->subject_id) {
        return Err::RoleOrderViolation;
      }
    } else if (!is_root(cert.role) || cert.issuer_id != cert.subject_id) {
      return Err::RoleOrderViolation;
    }
    if (check_time < cert.not_before || check_time > cert.not_after) return Err::Expired;
    parent = &cert;
  }
  const Certificate& leaf = chain.certs.back();
  return VerifiedLeaf{leaf.subject_id, leaf.role, leaf.key_group, leaf.public_part,
                      leaf.attributes_allowed};
}

}  // namespace meid::pki
