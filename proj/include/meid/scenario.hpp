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
#include <set>
#include <string>
#include <vector>

#include "meid/errors.hpp"
#include "meid/token.hpp"

namespace meid::scenario {

// Exit codes of the CLI (stable interface):
//   0 success, 1 config/IO error, 2 protocol failure (expected aborts),
//   3 security assertion failure or replay mismatch.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitProtocolFailure = 2;
inline constexpr int kExitSecurityFailure = 3;

enum class CapturedVariant : std::uint8_t { Valid, WrongDob, Unregistered };

struct ScenarioConfig {
  std::uint64_t seed = 1;
  /// Which scenario cmd_replay re-runs: init | auth | attack-sniff |
  /// attack-relay | attack-relay-personalize.
  std::string command = "init";

  bool tee_available = true;
  bool se_available = true;
  /// When false, `auth` runs against a virgin world and aborts.
  bool run_init = true;

  EidToken citizen;
  std::string card_pin = "13774";

  std::string init_pin = "123456";
  CapturedVariant captured = CapturedVariant::Valid;

  std::vector<std::string> auth_pin_attempts = {"123456"};
  /// Unset = approve everything requested; an empty set approves nothing.
  std::optional<std::set<std::string>> consent_choice;
  std::set<std::string> requested_attributes;    // offerer's required set
  std::set<std::string> terminal_attributes_allowed;

  std::string attack = "sniff";
  std::string store_path = "meid_store.bin";

  // Test hooks, not reachable from config files.
  bool debug_leak_token = false;
  bool tamper_stored_blob = false;

  static ScenarioConfig defaults();
};

/// Parses the key/value config text (INI-style sections, '#' comments).
/// Unknown sections or keys are rejected.
Outcome<ScenarioConfig> parse_config_text(const std::string& text);
/// "default" or "" yields the built-in configuration.
Outcome<ScenarioConfig> load_config_file(const std::string& path);

struct ReportStep {
  int step = 0;
  std::string name;
  std::string status;
};

struct SecurityAssertion {
  std::string name;
  bool ok = false;
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  int exit_code = 0;
  std::string status;
  std::vector<ReportStep> steps;
  std::vector<SecurityAssertion> security_assertions;
  std::string transcript_path;

  std::string to_json() const;  // stable field order
};

struct RunResult {
  int exit_code = 0;
  RunReport report;
  std::string transcript;  // JSONL text
};

RunResult run_init_scenario(const ScenarioConfig& config);
RunResult run_auth_scenario(const ScenarioConfig& config);
RunResult run_attack_scenario(const ScenarioConfig& config, const std::string& which);
/// Dispatches on config.command.
RunResult run_scenario(const ScenarioConfig& config);

/// Re-runs the configured scenario and byte-compares against the transcript
/// file. Exit 0 on identity, 1 on unreadable/invalid file, 3 on mismatch.
int cmd_replay(const std::string& transcript_path, const ScenarioConfig& config);

struct CliOptions {
  std::string command;  // init | auth | attack | replay
  std::string attack_kind;
  std::optional<std::uint64_t> seed;
  std::string config_path = "default";
  std::string transcript_path = "transcript.jsonl";
  std::string report_path = "report.json";
};

/// Full CLI behavior behind main(): loads config, runs, writes transcript and
/// report files. Returns the process exit code.
int run_cli(const CliOptions& options);

}  // namespace meid::scenario
