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

#include <deque>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "meid/bytes.hpp"
#include "meid/crypto.hpp"
#include "meid/errors.hpp"

namespace meid::transport {

enum class Channel : std::uint8_t {
  HOST_SE = 1,       // normal-world app <-> TEE boundary, carrying APDUs (tappable)
  TEE_SE = 2,        // monitor call TEE <-> secure element (not tappable)
  HOST_ISSUER = 3,
  HOST_TSM = 4,
  HOST_EIDSERVER = 5,
  SERVER_SIDE = 6,   // pre-authenticated links between remote actors (not tappable)
};

const char* channel_name(Channel c);
bool channel_interceptable(Channel c);

enum class EventKind : std::uint8_t { Sent, Delivered, Dropped, Substituted };
const char* event_name(EventKind e);

struct Envelope {
  std::uint64_t seq = 0;
  Channel channel = Channel::HOST_SE;
  std::string from;
  std::string to;
  bool plaintext_flag = false;
  Bytes payload;
};

struct TranscriptRecord {
  std::uint64_t seq = 0;
  Channel channel = Channel::HOST_SE;
  std::string from;
  std::string to;
  bool plaintext_flag = false;
  EventKind event = EventKind::Sent;
  Bytes payload;

  /// One JSON object, fixed key order, no whitespace. Bit-exact across runs.
  std::string to_jsonl() const;
};

class Transcript {
 public:
  void append(const Envelope& env, EventKind event);
  const std::vector<TranscriptRecord>& records() const { return records_; }
  /// Full JSONL document ('\n' after every record).
  std::string text() const;

 private:
  std::vector<TranscriptRecord> records_;
};

/// What a passive or relaying adversary has accumulated.
struct KnowledgeSet {
  std::set<Bytes> observed_aids;       // from plaintext SELECT commands
  std::vector<Bytes> observed_blobs;   // every other observed payload
  std::vector<crypto::SymmetricKey> keys;  // keys granted to the adversary
  std::vector<Bytes> derived_plaintext;

  void observe(const Envelope& env);
};

enum class InterceptAction : std::uint8_t {
  Observe,     // copy into a KnowledgeSet, traffic unchanged
  Drop,        // message never delivered
  Delay,       // held back until the next send on any channel
  Duplicate,   // a second copy is enqueued
  Substitute,  // payload replaced
  RelayVia,    // delivered to an adversary actor, then re-sent to the target
};

struct InterceptorPolicy {
  Channel channel = Channel::HOST_SE;
  InterceptAction action = InterceptAction::Observe;
  Bytes substitute_payload;
  std::string relay_actor;
  KnowledgeSet* knowledge = nullptr;
  std::function<bool(const Envelope&)> match;  // optional extra filter
};

/// FIFO message transport with interception hooks. Interceptors run at send
/// time in registration order; every envelope event lands in the transcript.
class Bus {
 public:
  /// Throws RoutingError for TEE_SE / SERVER_SIDE (host-CPU adversary only).
  void add_interceptor(InterceptorPolicy policy);
  void clear_interceptors() { policies_.clear(); }

  /// Returns false when the message was dropped by a policy.
  bool send(Envelope env);
  std::optional<Envelope> deliver_next();
  bool pending() const { return !queue_.empty(); }

  Transcript& transcript() { return transcript_; }
  const Transcript& transcript() const { return transcript_; }

 private:
  bool apply_policies(Envelope& env);

  std::deque<Envelope> queue_;
  std::optional<Envelope> delayed_;
  std::vector<InterceptorPolicy> policies_;
  Transcript transcript_;
  std::uint64_t seq_ = 0;
};

/// Tries every observed blob against every granted key, peeling the byte
/// framings the simulator uses (raw AEAD, APDU-wrapped AEAD, secure-messaging
/// payloads). Successes are appended to derived_plaintext and returned.
std::vector<Bytes> attempt_decrypt(KnowledgeSet& knowledge);

struct ScanHit {
  std::uint64_t seq = 0;
  Channel channel = Channel::HOST_SE;
  std::size_t corpus_index = 0;
};

/// Reports every transcript record whose payload contains a corpus item as a
/// contiguous byte substring. Items shorter than 4 bytes are skipped (they
/// false-positive against ciphertext).
std::vector<ScanHit> knowledge_scan(const std::vector<TranscriptRecord>& records,
                                    const std::vector<Bytes>& secret_corpus);

}  // namespace meid::transport
