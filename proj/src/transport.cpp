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

#include "meid/transport.hpp"

#include "meid/apdu.hpp"

namespace meid::transport {

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::HOST_SE: return "HOST_SE";
    case Channel::TEE_SE: return "TEE_SE";
    case Channel::HOST_ISSUER: return "HOST_ISSUER";
    case Channel::HOST_TSM: return "HOST_TSM";
    case Channel::HOST_EIDSERVER: return "HOST_EIDSERVER";
    case Channel::SERVER_SIDE: return "SERVER_SIDE";
  }
  return "?";
}

bool channel_interceptable(Channel c) {
  return c == Channel::HOST_SE || c == Channel::HOST_ISSUER || c == Channel::HOST_TSM ||
         c == Channel::HOST_EIDSERVER;
}

const char* event_name(EventKind e) {
  switch (e) {
    case EventKind::Sent: return "sent";
    case EventKind::Delivered: return "delivered";
    case EventKind::Dropped: return "dropped";
    case EventKind::Substituted: return "substituted";
  }
  return "?";
}

std::string TranscriptRecord::to_jsonl() const {
  // Actor ids and channel names are plain ASCII tokens, so no JSON escaping
  // is required here.
  std::string out;
  out.reserve(64 + payload.size() * 2);
  out += "{\"seq\":";
  out += std::to_string(seq);
  out += ",\"channel\":\"";
  out += channel_name(channel);
  out += "\",\"from\":\"";
  out += from;
  out += "\",\"to\":\"";
  out += to;
  out += "\",\"plaintext_flag\":";
  out += plaintext_flag ? "true" : "false";
  out += ",\"event\":\"";
  out += event_name(event);
  out += "\",\"payload_hex\":\"";
  out += hex_encode(payload);
  out += "\"}";
  return out;
}

void Transcript::append(const Envelope& env, EventKind event) {
  records_.push_back(TranscriptRecord{env.seq, env.channel, env.from, env.to,
                                      env.plaintext_flag, event, env.payload});
}

std::string Transcript::text() const {
  std::string out;
  for (const auto& rec : records_) {
    out += rec.to_jsonl();
    out += '\n';
  }
  return out;
}

void KnowledgeSet::observe(const Envelope& env) {
  if (env.plaintext_flag) {
    auto cmd = apdu::ApduCommand::parse(env.payload);
    if (cmd && apdu::is_select(*cmd) && !cmd->data.empty()) {
      observed_aids.insert(cmd->data);
      return;
    }
  }
  observed_blobs.push_back(env.payload);
}

void Bus::add_interceptor(InterceptorPolicy policy) {
  if (!channel_interceptable(policy.channel))
    throw Error(Err::RoutingError, "channel not interceptable");
  policies_.push_back(std::move(policy));
}

bool Bus::apply_policies(Envelope& env) {
  for (const auto& policy : policies_) {
    if (policy.channel != env.channel) continue;
    if (policy.match && !policy.match(env)) continue;
    switch (policy.action) {
      case InterceptAction::Observe:
        if (policy.knowledge) policy.knowledge->observe(env);
        break;
      case InterceptAction::Drop:
        transcript_.append(env, EventKind::Dropped);
        return false;
      case InterceptAction::Delay:
        if (!delayed_) {
          delayed_ = env;
          return false;  // held, not yet queued
        }
        break;
      case InterceptAction::Duplicate: {
        Envelope copy = env;
        copy.seq = ++seq_;
        transcript_.append(copy, EventKind::Sent);
        queue_.push_back(std::move(copy));
        break;
      }
      case InterceptAction::Substitute:
        env.payload = policy.substitute_payload;
        transcript_.append(env, EventKind::Substituted);
        break;
      case InterceptAction::RelayVia: {
        if (policy.knowledge) policy.knowledge->observe(env);
        Envelope hop = env;
        hop.to = policy.relay_actor;
        transcript_.append(hop, EventKind::Delivered);
        Envelope forwarded = env;
        forwarded.seq = ++seq_;
        forwarded.from = policy.relay_actor;
        transcript_.append(forwarded, EventKind::Sent);
        queue_.push_back(std::move(forwarded));
        return false;  // original consumed by the relay hop
      }
    }
  }
  return true;
}

bool Bus::send(Envelope env) {
  env.seq = ++seq_;
  transcript_.append(env, EventKind::Sent);
  // A previously delayed envelope is released behind the one being sent now.
  std::optional<Envelope> release;
  if (delayed_) {
    release = std::move(*delayed_);
    delayed_.reset();
  }
  bool queued = apply_policies(env);
  if (queued) queue_.push_back(std::move(env));
  if (release) queue_.push_back(std::move(*release));
  return queued;
}

std::optional<Envelope> Bus::deliver_next() {
  if (queue_.empty()) return std::nullopt;
  Envelope env = std::move(queue_.front());
  queue_.pop_front();
  transcript_.append(env, EventKind::Delivered);
  return env;
}

namespace {

// Candidate (ciphertext, aad) pairs for one observed payload, covering the
// framings used on the wire.
struct Candidate {
  crypto::AeadCiphertext ct;
  Bytes aad;
};

void add_candidate(std::vector<Candidate>& out, BytesView blob, Bytes aad) {
  if (auto ct = crypto::AeadCiphertext::parse(blob)) out.push_back({*ct, std::move(aad)});
}

std::vector<Candidate> candidates_for(BytesView payload) {
  std::vector<Candidate> out;
  add_candidate(out, payload, {});
  add_candidate(out, payload, to_bytes("token"));
  if (auto cmd = apdu::ApduCommand::parse(payload)) {
    add_candidate(out, cmd->data, cmd->header());
    add_candidate(out, cmd->data, to_bytes("token"));
    // secure-messaging frame: counter || aead, aad = "SM" || dir || counter
    if (cmd->data.size() > 8) {
      BytesView data(cmd->data);
      Bytes counter(data.begin(), data.begin() + 8);
      for (std::uint8_t dir : {0, 1}) {
        Bytes aad = concat({to_bytes("SM"), BytesView(&dir, 1), counter});
        add_candidate(out, data.subspan(8), std::move(aad));
      }
    }
  }
  if (auto resp = apdu::ApduResponse::parse(payload)) {
    add_candidate(out, resp->data, {});
    add_candidate(out, resp->data, to_bytes("token"));
    if (resp->data.size() > 8) {
      BytesView data(resp->data);
      Bytes counter(data.begin(), data.begin() + 8);
      for (std::uint8_t dir : {0, 1}) {
        Bytes aad = concat({to_bytes("SM"), BytesView(&dir, 1), counter});
        add_candidate(out, data.subspan(8), std::move(aad));
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Bytes> attempt_decrypt(KnowledgeSet& knowledge) {
  std::vector<Bytes> derived;
  for (const Bytes& blob : knowledge.observed_blobs) {
    auto cands = candidates_for(blob);
    for (const auto& cand : cands) {
      for (const auto& key : knowledge.keys) {
        if (auto plain = crypto::aead_decrypt(key, cand.ct, cand.aad)) {
          derived.push_back(*plain);
        }
      }
    }
  }
  knowledge.derived_plaintext.insert(knowledge.derived_plaintext.end(), derived.begin(),
                                     derived.end());
  return derived;
}

std::vector<ScanHit> knowledge_scan(const std::vector<TranscriptRecord>& records,
                                    const std::vector<Bytes>& secret_corpus) {
  std::vector<ScanHit> hits;
  for (const auto& rec : records) {
    if (rec.event != EventKind::Sent) continue;  // one hit per envelope
    for (std::size_t i = 0; i < secret_corpus.size(); ++i) {
      if (secret_corpus[i].size() < 4) continue;
      if (contains_subsequence(rec.payload, secret_corpus[i])) {
        hits.push_back(ScanHit{rec.seq, rec.channel, i});
      }
    }
  }
  return hits;
}

}  // namespace meid::transport
