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

#include <string>
#include <vector>

#include "meid/scenario.hpp"
#include "meid/transport.hpp"

namespace meid::attack {

// Executable reproductions of the two identified vulnerabilities. Both are
// expected to end "non-critical": the scenario completes and the adversary
// derives no plaintext.

struct AttackOutcome {
  transport::KnowledgeSet knowledge;
  bool scenario_completed = false;
  std::size_t derived_count = 0;
  std::size_t transcript_records = 0;
  std::size_t baseline_records = 0;  // same scenario without the attacker
  /// Scan of the attacked run's transcript against the world's secret corpus
  /// (non-TEE channels).
  std::size_t secret_hits = 0;
  bool assertions_ok = false;
  std::vector<std::string> notes;
  std::string transcript;  // JSONL of the attacked run
};

/// Passive sniffer on the host<->SE channel across a full init+auth run.
/// Learns exactly the selected AIDs and nothing else.
AttackOutcome attack_select_sniff(const scenario::ScenarioConfig& config);

/// Relays provisioning traffic through an adversary actor. The `personalize`
/// variant redirects the token-package traffic on the host<->TSM channel
/// instead of the SSD-install APDU traffic.
AttackOutcome attack_relay_install(const scenario::ScenarioConfig& config,
                                   bool personalize_variant);

}  // namespace meid::attack
