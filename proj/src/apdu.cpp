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

#include "meid/apdu.hpp"

#include "meid/errors.hpp"

namespace meid::apdu {

Bytes ApduCommand::encode() const {
  if (data.size() > kMaxData) throw Error(Err::ParseError, "short APDU data limit exceeded");
  Bytes out{cla, ins, p1, p2};
  if (!data.empty()) {
    out.push_back(static_cast<std::uint8_t>(data.size()));
    out.insert(out.end(), data.begin(), data.end());
  }
  if (le) out.push_back(*le);
  return out;
}

std::optional<ApduCommand> ApduCommand::parse(BytesView b) {
  if (b.size() < 4) return std::nullopt;
  ApduCommand cmd;
  cmd.cla = b[0];
  cmd.ins = b[1];
  cmd.p1 = b[2];
  cmd.p2 = b[3];
  if (b.size() == 4) return cmd;
  if (b.size() == 5) {
    cmd.le = b[4];
    return cmd;
  }
  std::size_t lc = b[4];
  if (lc == 0) return std::nullopt;
  if (b.size() == 5 + lc) {
    cmd.data.assign(b.begin() + 5, b.end());
    return cmd;
  }
  if (b.size() == 5 + lc + 1) {
    cmd.data.assign(b.begin() + 5, b.begin() + 5 + lc);
    cmd.le = b[5 + lc];
    return cmd;
  }
  return std::nullopt;
}

Bytes ApduResponse::encode() const {
  Bytes out = data;
  out.push_back(static_cast<std::uint8_t>(sw >> 8));
  out.push_back(static_cast<std::uint8_t>(sw));
  return out;
}

std::optional<ApduResponse> ApduResponse::parse(BytesView b) {
  if (b.size() < 2) return std::nullopt;
  ApduResponse resp;
  resp.data.assign(b.begin(), b.end() - 2);
  resp.sw = static_cast<std::uint16_t>(b[b.size() - 2] << 8 | b[b.size() - 1]);
  return resp;
}

bool is_select(const ApduCommand& cmd) {
  return cmd.ins == kInsSelect && !cmd.chained();
}

std::vector<ApduCommand> chain_split(std::uint8_t cla, std::uint8_t ins, std::uint8_t p1,
                                     std::uint8_t p2, BytesView data) {
  std::vector<ApduCommand> out;
  std::size_t offset = 0;
  do {
    std::size_t n = std::min(data.size() - offset, kMaxData);
    ApduCommand cmd;
    cmd.ins = ins;
    cmd.p1 = p1;
    cmd.p2 = p2;
    cmd.data.assign(data.begin() + offset, data.begin() + offset + n);
    offset += n;
    cmd.cla = offset < data.size() ? static_cast<std::uint8_t>(cla | kClaChainBit) : cla;
    out.push_back(std::move(cmd));
  } while (offset < data.size());
  return out;
}

}  // namespace meid::apdu
