// Copyright 2026 The Tundra Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tundra {

using ByteBuffer = std::vector<uint8_t>;

ByteBuffer readFileBytes(const std::filesystem::path& path);
void writeFileBytes(const std::filesystem::path& path, std::span<const uint8_t> bytes);
void writeFileText(const std::filesystem::path& path, std::string_view text);

std::string base64Encode(std::span<const uint8_t> bytes);
ByteBuffer base64Decode(std::string_view text);

// Little-endian helpers for binary blobs.
inline void putU64(ByteBuffer& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
inline void putF64(ByteBuffer& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  putU64(out, bits);
}
inline void putF32(ByteBuffer& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(bits >> (8 * i)));
}
inline uint64_t getU64(std::span<const uint8_t> in, size_t at) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(in[at + i]) << (8 * i);
  return v;
}
inline double getF64(std::span<const uint8_t> in, size_t at) {
  uint64_t bits = getU64(in, at);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}
inline float getF32(std::span<const uint8_t> in, size_t at) {
  uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<uint32_t>(in[at + i]) << (8 * i);
  float v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

// Shortest decimal text that parses back to the same value.
std::string formatDouble(double v);
std::string formatFloat(float v);

}  // namespace tundra
