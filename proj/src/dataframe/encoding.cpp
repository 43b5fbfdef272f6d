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

#include "tundra/dataframe/encoding.hpp"

#include <algorithm>
#include <cstring>

#include "tundra/common/bytes.hpp"
#include "tundra/common/hash.hpp"

namespace tundra {

namespace {

void putLength(std::vector<uint8_t>& out, size_t n) { putU64(out, static_cast<uint64_t>(n)); }

struct Encoder {
  std::vector<uint8_t>& out;

  void operator()(const Null&) const { out.push_back(0); }
  void operator()(int64_t v) const {
    out.push_back(1);
    putU64(out, static_cast<uint64_t>(v));
  }
  void operator()(double v) const {
    out.push_back(2);
    putF64(out, v);
  }
  void operator()(bool v) const {
    out.push_back(3);
    out.push_back(v ? 1 : 0);
  }
  void operator()(const std::string& v) const {
    out.push_back(4);
    putLength(out, v.size());
    out.insert(out.end(), v.begin(), v.end());
  }
  void operator()(const Bytes& v) const {
    out.push_back(5);
    putLength(out, v.data.size());
    out.insert(out.end(), v.data.begin(), v.data.end());
  }
  void operator()(const FloatVector& v) const {
    out.push_back(6);
    putLength(out, v.size());
    for (float f : v) putF32(out, f);
  }
  void operator()(const ImageRecord& v) const {
    out.push_back(7);
    putLength(out, v.path.size());
    out.insert(out.end(), v.path.begin(), v.path.end());
    putU64(out, static_cast<uint64_t>(v.width));
    putU64(out, static_cast<uint64_t>(v.height));
    out.push_back(static_cast<uint8_t>(v.mode));
    putLength(out, v.data.size());
    out.insert(out.end(), v.data.begin(), v.data.end());
  }
  void operator()(const Timestamp& v) const {
    out.push_back(8);
    putU64(out, static_cast<uint64_t>(v.seconds));
  }
  void operator()(const RowListValue& v) const {
    out.push_back(9);
    size_t n = v.rows ? v.rows->size() : 0;
    putLength(out, n);
    for (size_t i = 0; i < n; ++i) {
      auto bytes = encodeRow((*v.rows)[i]);
      putLength(out, bytes.size());
      out.insert(out.end(), bytes.begin(), bytes.end());
    }
  }
};

}  // namespace

void encodeCell(const Cell& cell, std::vector<uint8_t>& out) { std::visit(Encoder{out}, cell); }

std::vector<uint8_t> encodeCell(const Cell& cell) {
  std::vector<uint8_t> out;
  encodeCell(cell, out);
  return out;
}

std::vector<uint8_t> encodeRow(const Row& row) {
  std::vector<uint8_t> out;
  for (const auto& c : row.values) encodeCell(c, out);
  return out;
}

uint64_t hashCell(const Cell& cell) { return fnv1a64(encodeCell(cell)); }

bool isHashableKey(DType t) {
  return t != DType::Image && t != DType::Bytes && t != DType::FloatVector &&
         t != DType::RowList;
}

std::vector<Row> canonicalSort(std::vector<Row> rows) {
  std::vector<std::pair<std::vector<uint8_t>, size_t>> keys;
  keys.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) keys.emplace_back(encodeRow(rows[i]), i);
  std::sort(keys.begin(), keys.end());
  std::vector<Row> out;
  out.reserve(rows.size());
  for (auto& [_, i] : keys) out.push_back(std::move(rows[i]));
  return out;
}

}  // namespace tundra
