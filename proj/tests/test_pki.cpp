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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "meid/pki.hpp"
#include "meid/rng.hpp"

using namespace meid;
using namespace meid::pki;

namespace {

struct Fixture {
  Rng rng{21};
  crypto::KeyPair cvca_kp = crypto::generate_keypair(crypto::GroupId::Ed25519, rng);
  crypto::KeyPair dv_kp = crypto::generate_keypair(crypto::GroupId::Ed25519, rng);
  crypto::KeyPair terminal_kp = crypto::generate_keypair(crypto::GroupId::Ed25519, rng);
  crypto::KeyPair csca_kp = crypto::generate_keypair(crypto::GroupId::Ed25519, rng);
  crypto::KeyPair ds_kp = crypto::generate_keypair(crypto::GroupId::Ed25519, rng);
  TrustAnchor cvca = make_root(cvca_kp, "cvca", Role::CVCA, 0, 1000);
  TrustAnchor csca = make_root(csca_kp, "csca", Role::CSCA, 0, 1000);
  Certificate dv = issue_certificate(cvca_kp, cvca.certificate, "dv", crypto::GroupId::Ed25519,
                                     dv_kp.public_part, Role::DV, 0, 800)
                       .value();
  Certificate terminal =
      issue_certificate(dv_kp, dv, "terminal", crypto::GroupId::Ed25519,
                        terminal_kp.public_part, Role::TERMINAL, 0, 500,
                        {"given_names", "family_name"})
          .value();
  CertChain chain{{cvca.certificate, dv, terminal}};
};

}  // namespace

TEST_CASE("issuing follows the role order") {
  Fixture f;
  CHECK(verify_chain(f.cvca, CertChain{{f.cvca.certificate, f.dv}}, 100).ok());

  auto bad = issue_certificate(f.cvca_kp, f.cvca.certificate, "chip", crypto::GroupId::X25519,
                               f.ds_kp.public_part, Role::CHIP, 0, 100);
  CHECK(bad.error() == Err::RoleOrderViolation);

  auto wide = issue_certificate(f.cvca_kp, f.cvca.certificate, "dv2", crypto::GroupId::Ed25519,
                                f.dv_kp.public_part, Role::DV, 0, 2000);
  CHECK(wide.error() == Err::ValidityOutOfRange);
}

TEST_CASE("verify_chain accepts the anchor alone and full chains") {
  Fixture f;
  auto anchor_only = verify_chain(f.cvca, CertChain{{f.cvca.certificate}}, 100);
  REQUIRE(anchor_only.ok());
  CHECK(anchor_only.value().role == Role::CVCA);

  auto leaf = verify_chain(f.cvca, f.chain, 100);
  REQUIRE(leaf.ok());
  CHECK(leaf.value().subject_id == "terminal");
  CHECK(leaf.value().public_part == f.terminal_kp.public_part);
  CHECK(leaf.value().attributes_allowed == std::vector<std::string>{"family_name",
                                                                    "given_names"});
}

TEST_CASE("verify_chain reports the specific failure") {
  Fixture f;
  SUBCASE("mutated subject breaks the signature") {
    CertChain bad = f.chain;
    bad.certs[1].subject_id[0] ^= 0x01;
    CHECK(verify_chain(f.cvca, bad, 100).error() == Err::BadSignature);
  }
  SUBCASE("wrong anchor") {
    CHECK(verify_chain(f.csca, f.chain, 100).error() == Err::BadRoot);
  }
  SUBCASE("expired link") {
    CHECK(verify_chain(f.cvca, f.chain, 600).error() == Err::Expired);
    CHECK(verify_chain(f.cvca, f.chain, 501).error() == Err::Expired);
    CHECK(verify_chain(f.cvca, f.chain, 500).ok());
  }
  SUBCASE("cross-hierarchy chains always rejected") {
    Certificate ds = issue_certificate(f.csca_kp, f.csca.certificate, "ds",
                                       crypto::GroupId::Ed25519, f.ds_kp.public_part, Role::DS,
                                       0, 800)
                         .value();
    CertChain crossed{{f.cvca.certificate, ds}};
    CHECK_FALSE(verify_chain(f.cvca, crossed, 100).ok());
  }
  SUBCASE("empty chain") {
    CHECK(verify_chain(f.cvca, CertChain{}, 100).error() == Err::BadRoot);
  }
}

TEST_CASE("any single-field mutation of any link is rejected") {
  Fixture f;
  Rng rng(77);
  int rejected = 0, total = 0;
  for (std::size_t link = 0; link < f.chain.certs.size(); ++link) {
    for (int field = 0; field < 7; ++field) {
      CertChain bad = f.chain;
      Certificate& c = bad.certs[link];
      switch (field) {
        case 0: c.subject_id += "x"; break;
        case 1: c.role = c.role == Role::DV ? Role::TERMINAL : Role::DV; break;
        case 2: c.public_part[0] ^= 0x01; break;
        case 3: c.not_before += 1; break;
        case 4: c.not_after += 1; break;
        case 5: c.issuer_id += "x"; break;
        case 6: c.signature[static_cast<std::size_t>(rng.below(64))] ^= 0x01; break;
      }
      ++total;
      if (!verify_chain(f.cvca, bad, 100).ok()) ++rejected;
    }
  }
  CHECK(rejected == total);
}

TEST_CASE("canonical encoding is deterministic, injective and roundtrips") {
  Fixture f;
  CHECK(f.terminal.encode() == f.terminal.encode());

  Certificate role_twin = f.terminal;
  role_twin.role = Role::DV;
  CHECK(role_twin.encode() != f.terminal.encode());

  auto decoded = Certificate::decode(f.terminal.encode());
  REQUIRE(decoded.has_value());
  CHECK(*decoded == f.terminal);

  auto chain_decoded = CertChain::decode(f.chain.encode());
  REQUIRE(chain_decoded.has_value());
  CHECK(chain_decoded->certs == f.chain.certs);

  CHECK_FALSE(Certificate::decode(Bytes(5, 0)).has_value());
  Bytes truncated = f.terminal.encode();
  truncated.resize(truncated.size() - 3);
  CHECK_FALSE(Certificate::decode(truncated).has_value());
}
