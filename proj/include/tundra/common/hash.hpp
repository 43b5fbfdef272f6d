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
#include <span>
#include <string_view>

namespace tundra {

inline constexpr uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

// 64-bit FNV-1a. `state` allows hashing a sequence of buffers incrementally.
constexpr uint64_t fnv1a64(std::span<const uint8_t> bytes,
                           uint64_t state = kFnvOffsetBasis) {
  for (uint8_t b : bytes) {
    state ^= b;
    state *= kFnvPrime;
  }
  return state;
}

constexpr uint64_t fnv1a64(std::string_view text, uint64_t state = kFnvOffsetBasis) {
  for (char c : text) {
    state ^= static_cast<uint8_t>(c);
    state *= kFnvPrime;
  }
  return state;
}

// splitmix64 finalizer; used to derive independent seeds from one root seed.
constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for a named consumer. Different names give unrelated streams, so adding
// a consumer never perturbs another one.
constexpr uint64_t deriveSeed(uint64_t root, std::string_view consumer) {
  return splitmix64(root ^ splitmix64(fnv1a64(consumer)));
}

}  // namespace tundra
