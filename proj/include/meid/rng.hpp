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

#include <cstdint>

#include "meid/bytes.hpp"

namespace meid {

/// Deterministic scenario RNG (SplitMix64). The generator is intentionally
/// simple so an external reference implementation can reproduce the exact
/// byte stream from a seed. Byte output is the little-endian concatenation of
/// successive 64-bit draws, truncated to the requested length.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  Bytes bytes(std::size_t n) {
    Bytes out;
    out.reserve(n + 8);
    while (out.size() < n) {
      std::uint64_t v = next_u64();
      for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    out.resize(n);
    return out;
  }

  /// Uniform value in [0, bound). Used only for scripted test choices, not
  /// for key material, so modulo bias is acceptable.
  std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : next_u64() % bound; }

 private:
  std::uint64_t state_;
};

}  // namespace meid
