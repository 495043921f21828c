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

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "meid/bytes.hpp"
#include "meid/errors.hpp"

namespace meid {

struct World;

namespace host {

struct TcToken {
  std::set<std::string> required_attributes;  // non-empty
  std::string eid_server_address;
  Bytes offerer_session_id;

  Bytes encode() const;
  static std::optional<TcToken> decode(BytesView b);
};

/// Key/value blob storage on the untrusted file system. Persists to a flat
/// binary file ("MEIDSTOR" magic, u32 count, then u32-length-prefixed key and
/// value per entry, keys sorted) so the adversary and tests can scan it.
class UntrustedStore {
 public:
  void set_path(std::filesystem::path path) { path_ = std::move(path); }
  const std::filesystem::path& path() const { return path_; }

  void store_blob(const std::string& key, Bytes value);
  Outcome<Bytes> load_blob(const std::string& key) const;
  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  Bytes file_bytes() const;  // the exact persisted layout
  void persist() const;

 private:
  std::map<std::string, Bytes> kv_;
  std::filesystem::path path_;
};

struct StepOutcome {
  int step = 0;
  std::string name;
  std::string status;  // "ok", "skipped" or an error name
};

/// Step numbering frozen to the four initialization phases.
struct InitReport {
  bool success = false;
  std::vector<StepOutcome> steps;
  std::optional<int> abort_step;
  Err abort_cause = Err::None;
};

/// Step numbering frozen to the eight authentication steps.
struct AuthReport {
  bool success = false;
  std::vector<StepOutcome> steps;
  std::optional<int> abort_step;
  Err abort_cause = Err::None;
  bool ta_ok = false;
  bool ca_ok = false;
  std::set<std::string> approved;  // what consent released
};

/// The normal-world application: orchestrates initialization and
/// authentication end to end and owns the untrusted storage.
class HostApp {
 public:
  InitReport run_initialization(World& world);
  Outcome<TcToken> handle_tc_token_url(World& world, const std::string& url_like);
  AuthReport run_authentication(World& world, const TcToken& tc);

  UntrustedStore store;
  bool initialized = false;

  static constexpr const char* kTokenBlobKey = "eid_token_blob";

 private:
  std::uint32_t pending_ticket_ = 0;
};

}  // namespace host
}  // namespace meid
