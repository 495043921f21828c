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

#include "meid/token.hpp"

namespace meid {

Bytes EidToken::encode() const {
  ByteWriter w;
  w.str(document_number);
  w.str(given_names);
  w.str(family_name);
  w.str(date_of_birth);
  w.str(address);
  w.str(nationality);
  w.str(expiry);
  return w.take();
}

std::optional<EidToken> EidToken::decode(BytesView b) {
  ByteReader r(b);
  EidToken t;
  t.document_number = r.str();
  t.given_names = r.str();
  t.family_name = r.str();
  t.date_of_birth = r.str();
  t.address = r.str();
  t.nationality = r.str();
  t.expiry = r.str();
  if (!r.done()) return std::nullopt;
  return t;
}

const std::vector<std::string>& EidToken::attribute_names() {
  static const std::vector<std::string> names = {
      "document_number", "given_names", "family_name", "date_of_birth",
      "address",         "nationality", "expiry"};
  return names;
}

std::optional<std::string> EidToken::attribute(const std::string& name) const {
  if (name == "document_number") return document_number;
  if (name == "given_names") return given_names;
  if (name == "family_name") return family_name;
  if (name == "date_of_birth") return date_of_birth;
  if (name == "address") return address;
  if (name == "nationality") return nationality;
  if (name == "expiry") return expiry;
  return std::nullopt;
}

std::map<std::string, std::string> EidToken::as_map() const {
  std::map<std::string, std::string> out;
  for (const auto& name : attribute_names()) out[name] = *attribute(name);
  return out;
}

Bytes CapturedDocument::encode() const {
  ByteWriter w;
  w.bytes(fields.encode());
  w.bytes(card_pin_proof);
  return w.take();
}

std::optional<CapturedDocument> CapturedDocument::decode(BytesView b) {
  ByteReader r(b);
  auto fields = EidToken::decode(r.bytes());
  Bytes proof = r.bytes();
  if (!fields || !r.done()) return std::nullopt;
  return CapturedDocument{std::move(*fields), std::move(proof)};
}

Bytes encode_attribute_set(const std::set<std::string>& names) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(names.size()));
  for (const auto& n : names) w.str(n);  // std::set iterates sorted
  return w.take();
}

std::optional<std::set<std::string>> decode_attribute_set(ByteReader& r) {
  std::uint32_t n = r.u32();
  if (!r.ok() || n > 64) return std::nullopt;
  std::set<std::string> out;
  for (std::uint32_t i = 0; i < n; ++i) out.insert(r.str());
  if (!r.ok()) return std::nullopt;
  return out;
}

Bytes encode_attribute_map(const std::map<std::string, std::string>& attrs) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(attrs.size()));
  for (const auto& [k, v] : attrs) {
    w.str(k);
    w.str(v);
  }
  return w.take();
}

std::optional<std::map<std::string, std::string>> decode_attribute_map(BytesView b) {
  ByteReader r(b);
  std::uint32_t n = r.u32();
  if (!r.ok() || n > 64) return std::nullopt;
  std::map<std::string, std::string> out;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string k = r.str();
    out[k] = r.str();
  }
  if (!r.done()) return std::nullopt;
  return out;
}

}  // namespace meid
