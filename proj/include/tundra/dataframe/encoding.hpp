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
#include <vector>

#include "tundra/dataframe/value.hpp"

namespace tundra {

// Canonical byte encoding: one tag byte per cell followed by a fixed
// little-endian payload (length-prefixed for variable-size kinds). Equal
// cells encode identically on every platform.
void encodeCell(const Cell& cell, std::vector<uint8_t>& out);
std::vector<uint8_t> encodeCell(const Cell& cell);
std::vector<uint8_t> encodeRow(const Row& row);

// Shuffle hash: FNV-1a 64 over the canonical encoding.
uint64_t hashCell(const Cell& cell);

// Keys that can be shuffled on.
bool isHashableKey(DType t);

// Sort rows lexicographically by their canonical encodings. Used to compare
// outputs whose partition layout may differ.
std::vector<Row> canonicalSort(std::vector<Row> rows);

}  // namespace tundra
