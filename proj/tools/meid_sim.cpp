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

// Command-line driver: builds a world from config and runs the
// initialization, authentication, attack and replay scenarios.

#include <string>

#include "CLI11.hpp"
#include "meid/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"meid_sim - deterministic mobile-eID protocol simulator"};
  app.require_subcommand(1);

  meid::scenario::CliOptions options;
  std::uint64_t seed_value = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed_value, "scenario seed")->each([&](const std::string&) {
      seed_set = true;
    });
    cmd->add_option("--config", options.config_path,
                    "config file path, or 'default' for the built-in scenario");
    cmd->add_option("--transcript", options.transcript_path, "transcript output path (JSONL)");
    cmd->add_option("--report", options.report_path, "report output path (JSON)");
  };

  CLI::App* init = app.add_subcommand("init", "run the initialization flow");
  add_common(init);
  CLI::App* auth = app.add_subcommand("auth", "run initialization followed by authentication");
  add_common(auth);
  CLI::App* attack = app.add_subcommand("attack", "run an adversary scenario");
  attack->add_option("kind", options.attack_kind, "sniff | relay | relay-personalize")
      ->check(CLI::IsMember({"sniff", "relay", "relay-personalize"}))
      ->required();
  add_common(attack);
  CLI::App* replay = app.add_subcommand("replay", "re-run and byte-compare a transcript");
  add_common(replay);

  CLI11_PARSE(app, argc, argv);

  if (init->parsed()) options.command = "init";
  if (auth->parsed()) options.command = "auth";
  if (attack->parsed()) options.command = "attack";
  if (replay->parsed()) options.command = "replay";
  if (seed_set) options.seed = seed_value;

  return meid::scenario::run_cli(options);
}
