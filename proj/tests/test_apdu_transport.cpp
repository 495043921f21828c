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

#include "meid/apdu.hpp"
#include "meid/transport.hpp"

using namespace meid;
using namespace meid::apdu;
using namespace meid::transport;

TEST_CASE("APDU command encoding covers the four short cases") {
  ApduCommand c1{0x00, 0xA4, 0x04, 0x00, {}, std::nullopt};
  CHECK(c1.encode() == Bytes{0x00, 0xA4, 0x04, 0x00});

  ApduCommand c2{0x00, 0xB0, 0x00, 0x00, {}, 0x10};
  CHECK(c2.encode() == Bytes{0x00, 0xB0, 0x00, 0x00, 0x10});

  ApduCommand c3{0x80, 0x50, 0x00, 0x00, {1, 2, 3}, std::nullopt};
  CHECK(c3.encode() == Bytes{0x80, 0x50, 0x00, 0x00, 0x03, 1, 2, 3});

  ApduCommand c4{0x80, 0x50, 0x00, 0x00, {1, 2, 3}, 0x00};
  CHECK(c4.encode() == Bytes{0x80, 0x50, 0x00, 0x00, 0x03, 1, 2, 3, 0x00});

  for (const auto& cmd : {c1, c2, c3, c4}) {
    auto parsed = ApduCommand::parse(cmd.encode());
    REQUIRE(parsed.has_value());
    CHECK(*parsed == cmd);
  }
  CHECK_FALSE(ApduCommand::parse(Bytes{0x00, 0xA4}).has_value());
  CHECK_FALSE(ApduCommand::parse(Bytes{0x00, 0xA4, 0, 0, 9, 1, 2}).has_value());

  ApduCommand oversized;
  oversized.data = Bytes(256, 0xAA);
  CHECK_THROWS_AS(oversized.encode(), Error);
}

TEST_CASE("APDU response encoding") {
  ApduResponse ok{{0xDE, 0xAD}, kSwOk};
  CHECK(ok.encode() == Bytes{0xDE, 0xAD, 0x90, 0x00});
  auto parsed = ApduResponse::parse(ok.encode());
  REQUIRE(parsed.has_value());
  CHECK(*parsed == ok);
  CHECK(status(kSwFileNotFound).encode() == Bytes{0x6A, 0x82});
  CHECK_FALSE(ApduResponse::parse(Bytes{0x90}).has_value());
  CHECK(sw_tries_remaining(2) == 0x63C2);
}

TEST_CASE("chain_split produces short blocks with the chain bit") {
  Bytes payload(600, 0x42);
  auto blocks = chain_split(0x80, 0xE6, 0x0C, 0x00, payload);
  REQUIRE(blocks.size() == 3);
  CHECK(blocks[0].chained());
  CHECK(blocks[1].chained());
  CHECK_FALSE(blocks[2].chained());
  std::size_t total = 0;
  for (const auto& b : blocks) {
    CHECK(b.data.size() <= kMaxData);
    CHECK(b.ins == 0xE6);
    total += b.data.size();
  }
  CHECK(total == payload.size());

  auto single = chain_split(0x80, 0xE6, 0x0C, 0x00, Bytes(10, 1));
  REQUIRE(single.size() == 1);
  CHECK_FALSE(single[0].chained());
}

namespace {

Envelope make_env(Channel ch, const std::string& from, const std::string& to, Bytes payload,
                  bool plaintext = false) {
  Envelope env;
  env.channel = ch;
  env.from = from;
  env.to = to;
  env.plaintext_flag = plaintext;
  env.payload = std::move(payload);
  return env;
}

}  // namespace

TEST_CASE("bus delivery order equals send order without interceptors") {
  Bus bus;
  for (std::uint8_t i = 0; i < 5; ++i)
    bus.send(make_env(Channel::HOST_SE, "host", "tee", Bytes{i}));
  for (std::uint8_t i = 0; i < 5; ++i) {
    auto env = bus.deliver_next();
    REQUIRE(env.has_value());
    CHECK(env->payload == Bytes{i});
    CHECK(env->seq == i + 1u);
  }
  CHECK_FALSE(bus.deliver_next().has_value());
}

TEST_CASE("drop policy suppresses delivery and records the drop") {
  Bus bus;
  InterceptorPolicy drop;
  drop.channel = Channel::HOST_SE;
  drop.action = InterceptAction::Drop;
  bus.add_interceptor(drop);
  CHECK_FALSE(bus.send(make_env(Channel::HOST_SE, "host", "tee", Bytes{1})));
  CHECK_FALSE(bus.deliver_next().has_value());
  const auto& recs = bus.transcript().records();
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].event == EventKind::Sent);
  CHECK(recs[1].event == EventKind::Dropped);
}

TEST_CASE("substitute policy rewrites the payload and records it") {
  Bus bus;
  InterceptorPolicy sub;
  sub.channel = Channel::HOST_SE;
  sub.action = InterceptAction::Substitute;
  sub.substitute_payload = Bytes{9, 9, 9};
  bus.add_interceptor(sub);
  bus.send(make_env(Channel::HOST_SE, "host", "tee", Bytes{1}));
  auto env = bus.deliver_next();
  REQUIRE(env.has_value());
  CHECK(env->payload == Bytes{9, 9, 9});
  bool saw_substituted = false;
  for (const auto& rec : bus.transcript().records())
    if (rec.event == EventKind::Substituted) saw_substituted = true;
  CHECK(saw_substituted);
}

TEST_CASE("duplicate policy enqueues a second copy with its own seq") {
  Bus bus;
  InterceptorPolicy dup;
  dup.channel = Channel::HOST_SE;
  dup.action = InterceptAction::Duplicate;
  bus.add_interceptor(dup);
  bus.send(make_env(Channel::HOST_SE, "host", "tee", Bytes{5}));
  auto first = bus.deliver_next();
  auto second = bus.deliver_next();
  REQUIRE(first.has_value());
  REQUIRE(second.has_value());
  CHECK(first->payload == second->payload);
  CHECK(first->seq != second->seq);
}

TEST_CASE("delay policy holds a message back one send") {
  Bus bus;
  InterceptorPolicy delay;
  delay.channel = Channel::HOST_SE;
  delay.action = InterceptAction::Delay;
  delay.match = [](const Envelope& env) { return env.payload == Bytes{1}; };
  bus.add_interceptor(delay);
  bus.send(make_env(Channel::HOST_SE, "host", "tee", Bytes{1}));
  CHECK_FALSE(bus.deliver_next().has_value());  // held
  bus.send(make_env(Channel::HOST_SE, "host", "tee", Bytes{2}));
  auto a = bus.deliver_next();
  auto b = bus.deliver_next();
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->payload == Bytes{2});
  CHECK(b->payload == Bytes{1});
}

TEST_CASE("relay inserts an adversary hop and grows the transcript") {
  Bus bus;
  KnowledgeSet knowledge;
  InterceptorPolicy relay;
  relay.channel = Channel::HOST_SE;
  relay.action = InterceptAction::RelayVia;
  relay.relay_actor = "adversary";
  relay.knowledge = &knowledge;
  bus.add_interceptor(relay);
  bus.send(make_env(Channel::HOST_SE, "host", "tee", Bytes{7, 7}));
  auto env = bus.deliver_next();
  REQUIRE(env.has_value());
  CHECK(env->to == "tee");
  CHECK(env->from == "adversary");
  CHECK(env->payload == Bytes{7, 7});
  CHECK(knowledge.observed_blobs.size() == 1);
  // sent + delivered-to-adversary + forwarded sent + forwarded delivered
  CHECK(bus.transcript().records().size() == 4);
}

TEST_CASE("interceptors are limited to host-CPU channels") {
  Bus bus;
  InterceptorPolicy p;
  p.channel = Channel::TEE_SE;
  CHECK_THROWS_AS(bus.add_interceptor(p), Error);
  p.channel = Channel::SERVER_SIDE;
  CHECK_THROWS_AS(bus.add_interceptor(p), Error);
  p.channel = Channel::HOST_EIDSERVER;
  CHECK_NOTHROW(bus.add_interceptor(p));
}

TEST_CASE("transcript JSONL layout is exact and deterministic") {
  Bus bus;
  bus.send(make_env(Channel::HOST_SE, "host", "tee", Bytes{0xA0, 0x01}, true));
  bus.deliver_next();
  std::string text = bus.transcript().text();
  CHECK(text ==
        "{\"seq\":1,\"channel\":\"HOST_SE\",\"from\":\"host\",\"to\":\"tee\","
        "\"plaintext_flag\":true,\"event\":\"sent\",\"payload_hex\":\"a001\"}\n"
        "{\"seq\":1,\"channel\":\"HOST_SE\",\"from\":\"host\",\"to\":\"tee\","
        "\"plaintext_flag\":true,\"event\":\"delivered\",\"payload_hex\":\"a001\"}\n");

  Bus twin;
  twin.send(make_env(Channel::HOST_SE, "host", "tee", Bytes{0xA0, 0x01}, true));
  twin.deliver_next();
  CHECK(twin.transcript().text() == text);
}

TEST_CASE("observer collects AIDs from plaintext SELECTs and blobs otherwise") {
  KnowledgeSet k;
  ApduCommand sel;
  sel.cla = kClaIso;
  sel.ins = kInsSelect;
  sel.p1 = 0x04;
  sel.data = Bytes{0xA0, 0x00, 0x00, 0x01, 0x51};
  k.observe(make_env(Channel::HOST_SE, "host", "tee", sel.encode(), true));
  k.observe(make_env(Channel::HOST_SE, "host", "tee", Bytes{1, 2, 3}));
  CHECK(k.observed_aids.size() == 1);
  CHECK(k.observed_aids.count(sel.data) == 1);
  CHECK(k.observed_blobs.size() == 1);
}

TEST_CASE("attempt_decrypt derives nothing without keys, works with keys") {
  Rng rng(31);
  crypto::NonceRegistry nonces;
  crypto::SymmetricKey key = crypto::random_symmetric_key(crypto::KeyPurpose::TOKEN, rng);
  Bytes secret = to_bytes("attribute plaintext");
  crypto::AeadCiphertext ct =
      crypto::aead_encrypt(key, rng.bytes(crypto::kNonceLen), secret, to_bytes("token"),
                           nonces);

  KnowledgeSet k;
  k.observed_blobs.push_back(ct.serialize());
  CHECK(attempt_decrypt(k).empty());

  k.keys.push_back(key);
  auto derived = attempt_decrypt(k);
  REQUIRE(derived.size() == 1);
  CHECK(derived[0] == secret);

  // Keys of one session do not open another session's traffic.
  KnowledgeSet k2;
  crypto::SymmetricKey other = crypto::random_symmetric_key(crypto::KeyPurpose::TOKEN, rng);
  crypto::AeadCiphertext other_ct = crypto::aead_encrypt(
      other, rng.bytes(crypto::kNonceLen), to_bytes("post-rotation"), {}, nonces);
  k2.observed_blobs.push_back(other_ct.serialize());
  k2.keys.push_back(key);
  CHECK(attempt_decrypt(k2).empty());
}

TEST_CASE("attempt_decrypt peels APDU framing") {
  Rng rng(32);
  crypto::NonceRegistry nonces;
  crypto::SymmetricKey key = crypto::random_symmetric_key(crypto::KeyPurpose::TOKEN, rng);
  Bytes secret = to_bytes("wrapped in an apdu");
  crypto::AeadCiphertext ct =
      crypto::aead_encrypt(key, rng.bytes(crypto::kNonceLen), secret, to_bytes("token"),
                           nonces);
  ApduCommand cmd;
  cmd.cla = kClaProprietary;
  cmd.ins = kInsLoadToken;
  cmd.data = ct.serialize();

  KnowledgeSet k;
  k.observed_blobs.push_back(cmd.encode());
  k.keys.push_back(key);
  auto derived = attempt_decrypt(k);
  REQUIRE(derived.size() == 1);
  CHECK(derived[0] == secret);
}

TEST_CASE("knowledge_scan finds planted secrets and honors the length floor") {
  Bus bus;
  Bytes secret = to_bytes("S3CR3T-BYTES");
  bus.send(make_env(Channel::HOST_TSM, "host", "tsm-remote",
                    concat({to_bytes("prefix"), secret, to_bytes("suffix")})));
  bus.deliver_next();

  auto hits = knowledge_scan(bus.transcript().records(), {secret});
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].channel == Channel::HOST_TSM);

  CHECK(knowledge_scan(bus.transcript().records(), {}).empty());
  CHECK(knowledge_scan(bus.transcript().records(), {to_bytes("pre")}).empty());  // < 4 bytes
  CHECK(knowledge_scan(bus.transcript().records(), {to_bytes("absent-item")}).empty());
}

TEST_CASE("codecs survive random byte soup without crashing") {
  Rng rng(0xF00D);
  for (int i = 0; i < 2000; ++i) {
    Bytes junk = rng.bytes(rng.below(80));
    (void)ApduCommand::parse(junk);
    (void)ApduResponse::parse(junk);
    (void)crypto::AeadCiphertext::parse(junk);
  }
}
