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

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace meid {

using Bytes = std::vector<std::uint8_t>;
using BytesView = std::span<const std::uint8_t>;

Bytes to_bytes(std::string_view s);
std::string to_string(BytesView b);
std::string hex_encode(BytesView b);
std::optional<Bytes> hex_decode(std::string_view s);
Bytes concat(std::initializer_list<BytesView> parts);
bool contains_subsequence(BytesView haystack, BytesView needle);

/// Canonical length-prefixed serializer. All multi-byte integers are
/// big-endian; variable-length fields carry a u32 length prefix. This is the
/// one encoding used for certificates, actor messages and persisted state, so
/// transcripts stay bit-exact across runs.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void raw(BytesView b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void bytes(BytesView b);            // u32 length prefix + raw
  void str(std::string_view s);       // u32 length prefix + raw
  Bytes take() { return std::move(buf_); }
  const Bytes& peek() const { return buf_; }

 private:
  Bytes buf_;
};

/// Bounds-checked reader matching ByteWriter. Any out-of-range read latches
/// the failed flag and yields zeros/empties; callers check ok() (and usually
/// at_end()) once after reading a whole structure.
class ByteReader {
 public:
  explicit ByteReader(BytesView b) : buf_(b) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  Bytes raw(std::size_t n);
  Bytes bytes();       // u32 length prefix + payload
  std::string str();

  bool ok() const { return !failed_; }
  bool at_end() const { return pos_ == buf_.size(); }
  bool done() const { return ok() && at_end(); }
  std::size_t remaining() const { return buf_.size() - pos_; }

 private:
  bool take(std::size_t n);
  BytesView buf_;
  std::size_t pos_ = 0;
  bool failed_ = false;
};

}  // namespace meid
