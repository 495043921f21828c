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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "meid/bytes.hpp"

namespace meid {

/// The personal-attribute payload of a derived identity. This is the asset
/// the whole architecture protects; its plaintext may exist only inside the
/// secure element and the service provider's records.
struct EidToken {
  std::string document_number;
  std::string given_names;
  std::string family_name;
  std::string date_of_birth;  // ISO-8601
  std::string address;
  std::string nationality;  // 2-letter code
  std::string expiry;       // ISO-8601

  Bytes encode() const;
  static std::optional<EidToken> decode(BytesView b);

  static const std::vector<std::string>& attribute_names();
  std::optional<std::string> attribute(const std::string& name) const;
  std::map<std::string, std::string> as_map() const;

  bool operator==(const EidToken& o) const = default;
};

/// What the camera capture step produces: the card's printed data plus a
/// proof derived from the card PIN.
struct CapturedDocument {
  EidToken fields;
  Bytes card_pin_proof;

  Bytes encode() const;
  static std::optional<CapturedDocument> decode(BytesView b);
};

Bytes encode_attribute_set(const std::set<std::string>& names);
std::optional<std::set<std::string>> decode_attribute_set(ByteReader& r);

Bytes encode_attribute_map(const std::map<std::string, std::string>& attrs);
std::optional<std::map<std::string, std::string>> decode_attribute_map(BytesView b);

}  // namespace meid
