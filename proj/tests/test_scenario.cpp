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

#include <filesystem>
#include <fstream>

#include "meid/scenario.hpp"
#include "test_util.hpp"

using namespace meid;
using namespace meid::scenario;
using meid::testutil::test_config;

namespace {

std::filesystem::path tmp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("meid_scn_" + name);
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace

TEST_CASE("config parsing accepts the documented grammar") {
  auto cfg = parse_config_text(R"(
# full scenario configuration
[scenario]
seed = 99
command = auth
tee_available = true
se_available = true
run_init = false
store = /tmp/x.bin

[citizen]
document_number = T22000129
given_names = ANNA
family_name = SCHMIDT
date_of_birth = 1990-01-02
address = TESTWEG 1
nationality = FR
expiry = 2030-12-31
card_pin = 98765

[init]
pin = 654321
captured = wrong_dob

[auth]
pin_attempts = 000000,654321
consent = given_names
requested = given_names,family_name

[terminal]
attributes_allowed = given_names,family_name,address

[attack]
kind = relay
)");
  REQUIRE(cfg.ok());
  const ScenarioConfig& c = cfg.value();
  CHECK(c.seed == 99);
  CHECK(c.command == "auth");
  CHECK_FALSE(c.run_init);
  CHECK(c.citizen.given_names == "ANNA");
  CHECK(c.citizen.nationality == "FR");
  CHECK(c.card_pin == "98765");
  CHECK(c.init_pin == "654321");
  CHECK(c.captured == CapturedVariant::WrongDob);
  CHECK(c.auth_pin_attempts == std::vector<std::string>{"000000", "654321"});
  REQUIRE(c.consent_choice.has_value());
  CHECK(*c.consent_choice == std::set<std::string>{"given_names"});
  CHECK(c.requested_attributes == std::set<std::string>{"given_names", "family_name"});
  CHECK(c.terminal_attributes_allowed.size() == 3);
  CHECK(c.attack == "relay");
  CHECK(c.store_path == "/tmp/x.bin");
}

TEST_CASE("unknown keys, sections and bad values are rejected") {
  CHECK_FALSE(parse_config_text("[scenario]\nbogus = 1\n").ok());
  CHECK_FALSE(parse_config_text("[nosuch]\nseed = 1\n").ok());
  CHECK_FALSE(parse_config_text("seed = 1\n").ok());  // key before section
  CHECK_FALSE(parse_config_text("[scenario]\nseed = abc\n").ok());
  CHECK_FALSE(parse_config_text("[scenario]\ntee_available = maybe\n").ok());
  CHECK_FALSE(parse_config_text("[scenario]\ncommand = fly\n").ok());
  CHECK_FALSE(parse_config_text("[auth]\nrequested = nonexistent_attr\n").ok());
  CHECK_FALSE(parse_config_text("[auth]\nrequested = none\n").ok());  // must be non-empty
  CHECK_FALSE(parse_config_text("[citizen]\nnationality = DEU\n").ok());
  CHECK_FALSE(parse_config_text("[scenario]\nnot a kv line\n").ok());
}

TEST_CASE("consent 'all' and 'none' forms") {
  auto all = parse_config_text("[auth]\nconsent = all\n");
  REQUIRE(all.ok());
  CHECK_FALSE(all.value().consent_choice.has_value());
  auto none = parse_config_text("[auth]\nconsent = none\n");
  REQUIRE(none.ok());
  REQUIRE(none.value().consent_choice.has_value());
  CHECK(none.value().consent_choice->empty());
}

TEST_CASE("load_config_file: default keyword and missing files") {
  CHECK(load_config_file("default").ok());
  CHECK(load_config_file("").ok());
  CHECK(load_config_file("/nonexistent/meid.cfg").error() == Err::ConfigError);
}

TEST_CASE("init scenario: exit 0, transcript non-empty, report well formed") {
  auto result = run_init_scenario(test_config(7));
  CHECK(result.exit_code == kExitOk);
  CHECK(result.report.status == "ok");
  CHECK(result.report.steps.size() == 4);
  CHECK_FALSE(result.transcript.empty());
  CHECK(result.report.to_json().find("\"scenario\":\"init\"") != std::string::npos);
}

TEST_CASE("auth scenario runs init first; run_init=false aborts with exit 2") {
  auto ok = run_auth_scenario(test_config(7));
  CHECK(ok.exit_code == kExitOk);
  CHECK(ok.report.steps.size() == 8);

  auto cfg = test_config(7);
  cfg.run_init = false;
  auto bare = run_auth_scenario(cfg);
  CHECK(bare.exit_code == kExitProtocolFailure);
}

TEST_CASE("protocol aborts exit 2 and still write a transcript") {
  auto cfg = test_config(7);
  cfg.tee_available = false;
  auto result = run_init_scenario(cfg);
  CHECK(result.exit_code == kExitProtocolFailure);
  CHECK(result.report.status.find("TeeUnavailable") != std::string::npos);
  // no envelopes before the availability check, but the file content is valid
  CHECK(result.transcript.empty());

  auto cfg2 = test_config(7);
  cfg2.captured = CapturedVariant::WrongDob;
  auto result2 = run_init_scenario(cfg2);
  CHECK(result2.exit_code == kExitProtocolFailure);
  CHECK_FALSE(result2.transcript.empty());  // partial transcript preserved
}

TEST_CASE("attack scenarios succeed with their assertions") {
  for (const char* kind : {"sniff", "relay", "relay-personalize"}) {
    auto result = run_attack_scenario(test_config(7), kind);
    CHECK(result.exit_code == kExitOk);
    for (const auto& assertion : result.report.security_assertions) CHECK(assertion.ok);
  }
}

TEST_CASE("exit codes are a pure function of config and seed") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    auto a = run_scenario(test_config(seed));
    auto b = run_scenario(test_config(seed));
    CHECK(a.exit_code == b.exit_code);
    CHECK(a.transcript == b.transcript);
  }
}

TEST_CASE("replay: identity, seed sensitivity, truncation") {
  auto cfg = test_config(7);
  cfg.command = "auth";
  auto result = run_auth_scenario(cfg);
  auto path = tmp_file("replay.jsonl");
  write_file(path, result.transcript);

  CHECK(cmd_replay(path.string(), cfg) == kExitOk);

  auto other_seed = cfg;
  other_seed.seed = 8;
  CHECK(cmd_replay(path.string(), other_seed) == kExitSecurityFailure);

  // truncated file: cut the final line in half
  write_file(path, result.transcript.substr(0, result.transcript.size() / 2));
  CHECK(cmd_replay(path.string(), cfg) == kExitConfigError);

  CHECK(cmd_replay("/nonexistent/transcript.jsonl", cfg) == kExitConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("run_cli writes transcript and report files") {
  CliOptions options;
  options.command = "init";
  options.config_path = "default";
  options.seed = 7;
  options.transcript_path = tmp_file("cli_t.jsonl").string();
  options.report_path = tmp_file("cli_r.json").string();
  CHECK(run_cli(options) == kExitOk);
  CHECK(std::filesystem::exists(options.transcript_path));
  CHECK(std::filesystem::exists(options.report_path));

  CliOptions replay = options;
  replay.command = "replay";
  CHECK(run_cli(replay) == kExitOk);

  CliOptions bad = options;
  bad.config_path = "/nonexistent/meid.cfg";
  CHECK(run_cli(bad) == kExitConfigError);

  std::filesystem::remove(options.transcript_path);
  std::filesystem::remove(options.report_path);
}

TEST_CASE("attack via run_cli maps kinds and exit codes") {
  CliOptions options;
  options.command = "attack";
  options.attack_kind = "sniff";
  options.seed = 7;
  options.transcript_path = tmp_file("cli_a.jsonl").string();
  options.report_path = tmp_file("cli_ar.json").string();
  CHECK(run_cli(options) == kExitOk);
  std::filesystem::remove(options.transcript_path);
  std::filesystem::remove(options.report_path);
}
