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

#include "meid/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "meid/attacks.hpp"
#include "meid/world.hpp"

namespace meid::scenario {

ScenarioConfig ScenarioConfig::defaults() {
  ScenarioConfig c;
  c.citizen.document_number = "L01X00T47";
  c.citizen.given_names = "ERIKA";
  c.citizen.family_name = "MUSTERMANN";
  c.citizen.date_of_birth = "1984-08-12";
  c.citizen.address = "HEIDESTRASSE 17, 51147 KOELN";
  c.citizen.nationality = "DE";
  c.citizen.expiry = "2031-10-31";
  c.requested_attributes = {"given_names", "family_name", "date_of_birth"};
  c.terminal_attributes_allowed = {"given_names", "family_name", "date_of_birth", "address",
                                   "nationality"};
  return c;
}

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  auto end = s.find_last_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  return s.substr(begin, end - begin + 1);
}

Outcome<bool> parse_bool(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  return Err::ConfigError;
}

Outcome<std::set<std::string>> parse_attr_list(const std::string& v) {
  std::set<std::string> out;
  if (trim(v) == "none") return out;
  std::stringstream ss(v);
  std::string item;
  const auto& names = EidToken::attribute_names();
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (std::find(names.begin(), names.end(), item) == names.end()) return Err::ConfigError;
    out.insert(item);
  }
  return out;
}

bool known_command(const std::string& c) {
  return c == "init" || c == "auth" || c == "attack-sniff" || c == "attack-relay" ||
         c == "attack-relay-personalize";
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Outcome<ScenarioConfig> parse_config_text(const std::string& text) {
  ScenarioConfig config = ScenarioConfig::defaults();
  std::string section;
  std::stringstream ss(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') return Err::ConfigError;
      section = trim(line.substr(1, line.size() - 2));
      if (section != "scenario" && section != "citizen" && section != "init" &&
          section != "auth" && section != "terminal" && section != "attack") {
        return Err::ConfigError;
      }
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) return Err::ConfigError;
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    auto boolean = [&](bool& target) -> Outcome<Unit> {
      auto b = parse_bool(value);
      if (!b) return b.error();
      target = b.value();
      return Unit{};
    };

    if (section == "scenario") {
      if (key == "seed") {
        try {
          config.seed = std::stoull(value);
        } catch (...) {
          return Err::ConfigError;
        }
      } else if (key == "command") {
        if (!known_command(value)) return Err::ConfigError;
        config.command = value;
      } else if (key == "tee_available") {
        if (auto s = boolean(config.tee_available); !s) return s.error();
      } else if (key == "se_available") {
        if (auto s = boolean(config.se_available); !s) return s.error();
      } else if (key == "run_init") {
        if (auto s = boolean(config.run_init); !s) return s.error();
      } else if (key == "store") {
        config.store_path = value;
      } else {
        return Err::ConfigError;
      }
    } else if (section == "citizen") {
      if (value.empty()) return Err::ConfigError;
      if (key == "document_number") config.citizen.document_number = value;
      else if (key == "given_names") config.citizen.given_names = value;
      else if (key == "family_name") config.citizen.family_name = value;
      else if (key == "date_of_birth") config.citizen.date_of_birth = value;
      else if (key == "address") config.citizen.address = value;
      else if (key == "nationality" && value.size() == 2) config.citizen.nationality = value;
      else if (key == "expiry") config.citizen.expiry = value;
      else if (key == "card_pin") config.card_pin = value;
      else return Err::ConfigError;
    } else if (section == "init") {
      if (key == "pin") {
        config.init_pin = value;
      } else if (key == "captured") {
        if (value == "valid") config.captured = CapturedVariant::Valid;
        else if (value == "wrong_dob") config.captured = CapturedVariant::WrongDob;
        else if (value == "unregistered") config.captured = CapturedVariant::Unregistered;
        else return Err::ConfigError;
      } else {
        return Err::ConfigError;
      }
    } else if (section == "auth") {
      if (key == "pin_attempts") {
        config.auth_pin_attempts.clear();
        std::stringstream attempts(value);
        std::string item;
        while (std::getline(attempts, item, ',')) {
          item = trim(item);
          if (!item.empty()) config.auth_pin_attempts.push_back(item);
        }
        if (config.auth_pin_attempts.empty()) return Err::ConfigError;
      } else if (key == "consent") {
        if (value == "all") {
          config.consent_choice.reset();
        } else {
          auto set = parse_attr_list(value);
          if (!set) return set.error();
          config.consent_choice = set.value();
        }
      } else if (key == "requested") {
        auto set = parse_attr_list(value);
        if (!set || set.value().empty()) return Err::ConfigError;
        config.requested_attributes = set.value();
      } else {
        return Err::ConfigError;
      }
    } else if (section == "terminal") {
      if (key == "attributes_allowed") {
        auto set = parse_attr_list(value);
        if (!set) return set.error();
        config.terminal_attributes_allowed = set.value();
      } else {
        return Err::ConfigError;
      }
    } else if (section == "attack") {
      if (key == "kind" &&
          (value == "sniff" || value == "relay" || value == "relay-personalize")) {
        config.attack = value;
      } else {
        return Err::ConfigError;
      }
    } else {
      return Err::ConfigError;  // key before any section
    }
  }
  return config;
}

Outcome<ScenarioConfig> load_config_file(const std::string& path) {
  if (path.empty() || path == "default") return ScenarioConfig::defaults();
  std::ifstream in(path);
  if (!in) return Err::ConfigError;
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string RunReport::to_json() const {
  std::string out = "{";
  out += "\"scenario\":\"" + json_escape(scenario) + "\"";
  out += ",\"seed\":" + std::to_string(seed);
  out += ",\"exit_code\":" + std::to_string(exit_code);
  out += ",\"status\":\"" + json_escape(status) + "\"";
  out += ",\"steps\":[";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += ",";
    out += "{\"step\":" + std::to_string(steps[i].step) + ",\"name\":\"" +
           json_escape(steps[i].name) + "\",\"status\":\"" + json_escape(steps[i].status) +
           "\"}";
  }
  out += "],\"security_assertions\":[";
  for (std::size_t i = 0; i < security_assertions.size(); ++i) {
    if (i) out += ",";
    out += "{\"name\":\"" + json_escape(security_assertions[i].name) + "\",\"ok\":";
    out += security_assertions[i].ok ? "true" : "false";
    out += "}";
  }
  out += "],\"transcript\":\"" + json_escape(transcript_path) + "\"}";
  out += "\n";
  return out;
}

namespace {

std::size_t non_tee_secret_hits(const World& world) {
  auto hits =
      transport::knowledge_scan(world.bus.transcript().records(), world.secret_corpus());
  std::size_t count = 0;
  for (const auto& hit : hits) {
    if (hit.channel != transport::Channel::TEE_SE) ++count;
  }
  return count;
}

void copy_steps(const std::vector<host::StepOutcome>& in, std::vector<ReportStep>& out) {
  for (const auto& s : in) out.push_back({s.step, s.name, s.status});
}

}  // namespace

RunResult run_init_scenario(const ScenarioConfig& config) {
  RunResult result;
  result.report.scenario = "init";
  result.report.seed = config.seed;
  auto world = World::build(config);
  auto report = world->host.run_initialization(*world);
  copy_steps(report.steps, result.report.steps);
  result.transcript = world->bus.transcript().text();

  std::size_t hits = non_tee_secret_hits(*world);
  result.report.security_assertions.push_back({"confidentiality-scan-non-tee", hits == 0});
  if (hits != 0) {
    result.exit_code = kExitSecurityFailure;
    result.report.status = "security-assertion-failed";
  } else if (report.success) {
    result.exit_code = kExitOk;
    result.report.status = "ok";
  } else {
    result.exit_code = kExitProtocolFailure;
    result.report.status = "aborted-step-" + std::to_string(*report.abort_step) + "-" +
                           err_name(report.abort_cause);
  }
  result.report.exit_code = result.exit_code;
  return result;
}

RunResult run_auth_scenario(const ScenarioConfig& config) {
  RunResult result;
  result.report.scenario = "auth";
  result.report.seed = config.seed;
  auto world = World::build(config);

  if (config.run_init) {
    auto init = world->host.run_initialization(*world);
    if (!init.success) {
      copy_steps(init.steps, result.report.steps);
      result.transcript = world->bus.transcript().text();
      result.exit_code = kExitProtocolFailure;
      result.report.status = "init-aborted-step-" + std::to_string(*init.abort_step) + "-" +
                             err_name(init.abort_cause);
      result.report.exit_code = result.exit_code;
      return result;
    }
  }

  host::AuthReport report;
  auto tc = world->host.handle_tc_token_url(*world, "eid://offerer-1");
  if (!tc) {
    report.success = false;
    report.abort_step = 1;
    report.abort_cause = tc.error();
    report.steps.push_back({1, "connect-eid-server", err_name(tc.error())});
  } else {
    report = world->host.run_authentication(*world, tc.value());
  }
  copy_steps(report.steps, result.report.steps);
  result.transcript = world->bus.transcript().text();

  std::size_t hits = non_tee_secret_hits(*world);
  result.report.security_assertions.push_back({"confidentiality-scan-non-tee", hits == 0});
  if (hits != 0) {
    result.exit_code = kExitSecurityFailure;
    result.report.status = "security-assertion-failed";
  } else if (report.success) {
    result.exit_code = kExitOk;
    result.report.status = "ok";
  } else {
    result.exit_code = kExitProtocolFailure;
    result.report.status = "aborted-step-" + std::to_string(*report.abort_step) + "-" +
                           err_name(report.abort_cause);
  }
  result.report.exit_code = result.exit_code;
  return result;
}

RunResult run_attack_scenario(const ScenarioConfig& config, const std::string& which) {
  RunResult result;
  result.report.scenario = "attack-" + which;
  result.report.seed = config.seed;

  attack::AttackOutcome outcome;
  if (which == "sniff") {
    outcome = attack::attack_select_sniff(config);
    result.report.security_assertions.push_back(
        {"aids-exactly-three", outcome.knowledge.observed_aids.size() == 3});
  } else if (which == "relay" || which == "relay-personalize") {
    outcome = attack::attack_relay_install(config, which == "relay-personalize");
    result.report.security_assertions.push_back(
        {"transcript-shape-differs", outcome.transcript_records != outcome.baseline_records});
  } else {
    result.exit_code = kExitConfigError;
    result.report.status = "unknown-attack";
    result.report.exit_code = result.exit_code;
    return result;
  }
  result.transcript = outcome.transcript;
  result.report.security_assertions.push_back(
      {"no-plaintext-derived", outcome.derived_count == 0});
  result.report.security_assertions.push_back(
      {"confidentiality-scan-non-tee", outcome.secret_hits == 0});
  result.report.security_assertions.push_back(
      {"scenario-completed", outcome.scenario_completed});

  if (!outcome.scenario_completed) {
    result.exit_code = kExitProtocolFailure;
    result.report.status = "scenario-failed";
  } else if (!outcome.assertions_ok) {
    result.exit_code = kExitSecurityFailure;
    result.report.status = "security-assertion-failed";
  } else {
    result.exit_code = kExitOk;
    result.report.status = "ok";
  }
  result.report.exit_code = result.exit_code;
  return result;
}

RunResult run_scenario(const ScenarioConfig& config) {
  if (config.command == "init") return run_init_scenario(config);
  if (config.command == "auth") return run_auth_scenario(config);
  if (config.command == "attack-sniff") return run_attack_scenario(config, "sniff");
  if (config.command == "attack-relay") return run_attack_scenario(config, "relay");
  if (config.command == "attack-relay-personalize")
    return run_attack_scenario(config, "relay-personalize");
  RunResult result;
  result.exit_code = kExitConfigError;
  result.report.scenario = config.command;
  result.report.status = "unknown-command";
  result.report.exit_code = kExitConfigError;
  return result;
}

int cmd_replay(const std::string& transcript_path, const ScenarioConfig& config) {
  std::ifstream in(transcript_path, std::ios::binary);
  if (!in) return kExitConfigError;
  std::stringstream buf;
  buf << in.rdbuf();
  std::string recorded = buf.str();

  // Validate the JSONL shape before re-running anything.
  std::stringstream lines(recorded);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    auto parsed = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded() || !parsed.is_object()) return kExitConfigError;
    for (const char* key :
         {"seq", "channel", "from", "to", "plaintext_flag", "event", "payload_hex"}) {
      if (!parsed.contains(key)) return kExitConfigError;
    }
  }

  RunResult rerun = run_scenario(config);
  return rerun.transcript == recorded ? kExitOk : kExitSecurityFailure;
}

int run_cli(const CliOptions& options) {
  auto config = load_config_file(options.config_path);
  if (!config) {
    std::cerr << "error: cannot load config '" << options.config_path << "'\n";
    return kExitConfigError;
  }
  ScenarioConfig cfg = config.value();
  if (options.seed) cfg.seed = *options.seed;

  if (options.command == "replay") {
    int code = cmd_replay(options.transcript_path, cfg);
    std::cout << (code == kExitOk ? "replay: transcripts identical"
                                  : "replay: mismatch or unreadable transcript")
              << "\n";
    return code;
  }

  if (options.command == "init") cfg.command = "init";
  else if (options.command == "auth") cfg.command = "auth";
  else if (options.command == "attack") cfg.command = "attack-" + (options.attack_kind.empty()
                                                                        ? cfg.attack
                                                                        : options.attack_kind);
  else {
    std::cerr << "error: unknown command '" << options.command << "'\n";
    return kExitConfigError;
  }

  RunResult result = run_scenario(cfg);
  result.report.transcript_path = options.transcript_path;

  {
    std::ofstream out(options.transcript_path, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "error: cannot write transcript '" << options.transcript_path << "'\n";
      return kExitConfigError;
    }
    out << result.transcript;
  }
  {
    std::ofstream out(options.report_path, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "error: cannot write report '" << options.report_path << "'\n";
      return kExitConfigError;
    }
    out << result.report.to_json();
  }
  std::cout << result.report.scenario << ": " << result.report.status << "\n";
  for (const auto& assertion : result.report.security_assertions) {
    std::cout << "  [" << (assertion.ok ? "ok" : "FAIL") << "] " << assertion.name << "\n";
  }
  return result.exit_code;
}

}  // namespace meid::scenario
