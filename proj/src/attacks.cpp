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

#include "meid/attacks.hpp"

#include "meid/world.hpp"

namespace meid::attack {

using transport::Channel;
using transport::InterceptAction;
using transport::InterceptorPolicy;

namespace {

std::size_t scan_non_tee(const World& world) {
  auto hits = transport::knowledge_scan(world.bus.transcript().records(),
                                        world.secret_corpus());
  std::size_t count = 0;
  for (const auto& hit : hits) {
    if (hit.channel != Channel::TEE_SE) ++count;
  }
  return count;
}

bool run_init_and_auth(World& world, bool auth_too) {
  auto init = world.host.run_initialization(world);
  if (!init.success) return false;
  if (!auth_too) return true;
  auto tc = world.host.handle_tc_token_url(world, "eid://offerer-1");
  if (!tc) return false;
  auto auth = world.host.run_authentication(world, tc.value());
  return auth.success;
}

}  // namespace

AttackOutcome attack_select_sniff(const scenario::ScenarioConfig& config) {
  AttackOutcome out;
  auto world = World::build(config);
  InterceptorPolicy observe;
  observe.channel = Channel::HOST_SE;
  observe.action = InterceptAction::Observe;
  observe.knowledge = &out.knowledge;
  world->bus.add_interceptor(observe);

  out.scenario_completed = run_init_and_auth(*world, /*auth_too=*/true);
  out.derived_count = transport::attempt_decrypt(out.knowledge).size();
  out.transcript_records = world->bus.transcript().records().size();
  out.baseline_records = out.transcript_records;  // passive observation adds nothing
  out.secret_hits = scan_non_tee(*world);
  out.transcript = world->bus.transcript().text();

  bool aids_exact = out.knowledge.observed_aids.size() == 3 &&
                    out.knowledge.observed_aids.count(issuer_aid()) &&
                    out.knowledge.observed_aids.count(tsm_aid()) &&
                    out.knowledge.observed_aids.count(applet_aid());
  out.assertions_ok = out.scenario_completed && aids_exact && out.derived_count == 0 &&
                      out.secret_hits == 0;
  out.notes.push_back("observed AIDs: " + std::to_string(out.knowledge.observed_aids.size()));
  out.notes.push_back("derived plaintext fragments: " + std::to_string(out.derived_count));
  return out;
}

AttackOutcome attack_relay_install(const scenario::ScenarioConfig& config,
                                   bool personalize_variant) {
  AttackOutcome out;

  // Baseline: the same initialization without the attacker. A user comparing
  // the two runs could notice the relay from the extra hops alone.
  {
    auto baseline = World::build(config);
    baseline->host.run_initialization(*baseline);
    out.baseline_records = baseline->bus.transcript().records().size();
  }

  auto world = World::build(config);
  InterceptorPolicy relay;
  relay.action = InterceptAction::RelayVia;
  relay.relay_actor = actors::kAdversaryId;
  relay.knowledge = &out.knowledge;
  if (personalize_variant) {
    // Redirect the personalization exchange (captured upload, token package).
    relay.channel = Channel::HOST_TSM;
    relay.match = [](const transport::Envelope& env) {
      auto msg = actors::Msg::decode(env.payload);
      return msg && (msg->tag == actors::MsgTag::PersonalizeForward ||
                     msg->tag == actors::MsgTag::TokenPackageMsg);
    };
  } else {
    // Redirect the commands between app and secure element.
    relay.channel = Channel::HOST_SE;
  }
  world->bus.add_interceptor(relay);

  out.scenario_completed = run_init_and_auth(*world, /*auth_too=*/false);
  out.derived_count = transport::attempt_decrypt(out.knowledge).size();
  out.transcript_records = world->bus.transcript().records().size();
  out.secret_hits = scan_non_tee(*world);
  out.transcript = world->bus.transcript().text();

  bool registry_grew = world->sp.registry.size() == 1;
  out.assertions_ok = out.scenario_completed && registry_grew && out.derived_count == 0 &&
                      out.secret_hits == 0 &&
                      out.transcript_records != out.baseline_records;
  out.notes.push_back("relayed transcript records: " + std::to_string(out.transcript_records) +
                      " vs direct " + std::to_string(out.baseline_records));
  out.notes.push_back("derived plaintext fragments: " + std::to_string(out.derived_count));
  if (personalize_variant)
    out.notes.push_back("token package observed: " +
                        std::to_string(out.knowledge.observed_blobs.size()) + " blobs");
  return out;
}

}  // namespace meid::attack
