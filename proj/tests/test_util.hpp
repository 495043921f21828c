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

#include <unistd.h>

#include <filesystem>
#include <string>

#include "meid/bytes.hpp"
#include "meid/scenario.hpp"

namespace meid::testutil {

inline Bytes hx(const std::string& hex) {
  auto b = hex_decode(hex);
  return b ? *b : Bytes{};
}

inline scenario::ScenarioConfig test_config(std::uint64_t seed) {
  auto cfg = scenario::ScenarioConfig::defaults();
  cfg.seed = seed;
  // Keep unit-test artifacts out of the working directory.
  cfg.store_path =
      (std::filesystem::temp_directory_path() /
       ("meid_store_test_" + std::to_string(seed) + "_" + std::to_string(::getpid()) + ".bin"))
          .string();
  return cfg;
}

}  // namespace meid::testutil
