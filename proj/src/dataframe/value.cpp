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

#include "tundra/dataframe/value.hpp"

#include <algorithm>
#include <set>

namespace tundra {

std::string_view dtypeName(DType t) {
  switch (t) {
    case DType::Int64: return "Int64";
    case DType::Float64: return "Float64";
    case DType::Bool: return "Bool";
    case DType::String: return "String";
    case DType::Bytes: return "Bytes";
    case DType::FloatVector: return "FloatVector";
    case DType::Image: return "Image";
    case DType::Timestamp: return "Timestamp";
    case DType::RowList: return "RowList";
  }
  return "?";
}

std::optional<DType> parseDType(std::string_view name) {
  for (auto t : {DType::Int64, DType::Float64, DType::Bool, DType::String, DType::Bytes,
                 DType::FloatVector, DType::Image, DType::Timestamp, DType::RowList}) {
    if (dtypeName(t) == name) return t;
  }
  return std::nullopt;
}

std::string_view imageModeName(ImageMode m) { return m == ImageMode::Gray8 ? "GRAY8" : "RGB8"; }

std::optional<ImageMode> parseImageMode(std::string_view name) {
  if (name == "GRAY8") return ImageMode::Gray8;
  if (name == "RGB8") return ImageMode::Rgb8;
  return std::nullopt;
}

ImageRecord::ImageRecord(int w, int h, ImageMode m, std::string origin)
    : path(std::move(origin)),
      width(w),
      height(h),
      channels(channelsFor(m)),
      mode(m),
      data(static_cast<size_t>(w) * h * channelsFor(m), 0) {}

bool ImageRecord::wellFormed() const {
  return width > 0 && height > 0 && channels == channelsFor(mode) &&
         data.size() == static_cast<size_t>(width) * height * channels;
}

bool operator==(const RowListValue& a, const RowListValue& b) {
  if (a.rows == b.rows) return true;
  if (!a.rows || !b.rows) return false;
  return *a.rows == *b.rows;
}

bool isNull(const Cell& c) { return std::holds_alternative<Null>(c); }

DType cellKind(const Cell& c) {
  switch (c.index()) {
    case 1: return DType::Int64;
    case 2: return DType::Float64;
    case 3: return DType::Bool;
    case 4: return DType::String;
    case 5: return DType::Bytes;
    case 6: return DType::FloatVector;
    case 7: return DType::Image;
    case 8: return DType::Timestamp;
    case 9: return DType::RowList;
    default: throw Error(ErrorCode::SchemaMismatch, "null cell has no kind");
  }
}

Schema::Schema(std::vector<Column> columns) : columns_(std::move(columns)) {
  std::set<std::string_view> seen;
  for (const auto& c : columns_) {
    if (c.name.empty()) throw Error(ErrorCode::SchemaMismatch, "empty column name");
    if (!seen.insert(c.name).second) {
      throw Error(ErrorCode::SchemaMismatch, "duplicate column '" + c.name + "'");
    }
  }
}

Schema::Schema(std::initializer_list<std::pair<std::string, DType>> columns) {
  std::vector<Column> cols;
  for (const auto& [name, t] : columns) cols.push_back(Column{name, t, nullptr});
  *this = Schema(std::move(cols));
}

std::optional<size_t> Schema::find(std::string_view name) const {
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

size_t Schema::indexOf(std::string_view name, ErrorCode onMissing) const {
  if (auto i = find(name)) return *i;
  throw Error(onMissing, "no column '" + std::string(name) + "'");
}

Schema Schema::withColumn(Column c) const {
  auto cols = columns_;
  cols.push_back(std::move(c));
  return Schema(std::move(cols));
}

Schema Schema::select(const std::vector<std::string>& names) const {
  std::vector<Column> cols;
  for (const auto& n : names) cols.push_back(columns_[indexOf(n)]);
  return Schema(std::move(cols));
}

Schema Schema::drop(const std::vector<std::string>& names) const {
  for (const auto& n : names) indexOf(n);
  std::vector<Column> cols;
  for (const auto& c : columns_) {
    if (std::find(names.begin(), names.end(), c.name) == names.end()) cols.push_back(c);
  }
  return Schema(std::move(cols));
}

bool Schema::conforms(const Row& row) const {
  if (row.size() != columns_.size()) return false;
  for (size_t i = 0; i < row.size(); ++i) {
    if (isNull(row[i])) continue;
    if (cellKind(row[i]) != columns_[i].dtype) return false;
  }
  return true;
}

void Schema::check(const Row& row) const {
  if (row.size() != columns_.size()) {
    throw Error(ErrorCode::SchemaMismatch, "row arity " + std::to_string(row.size()) +
                                               " != schema arity " +
                                               std::to_string(columns_.size()));
  }
  for (size_t i = 0; i < row.size(); ++i) {
    if (isNull(row[i])) continue;
    auto kind = cellKind(row[i]);
    if (kind != columns_[i].dtype) {
      throw Error(ErrorCode::SchemaMismatch,
                  "column '" + columns_[i].name + "' expects " +
                      std::string(dtypeName(columns_[i].dtype)) + ", got " +
                      std::string(dtypeName(kind)));
    }
  }
}

bool operator==(const Schema& a, const Schema& b) {
  if (a.columns_.size() != b.columns_.size()) return false;
  for (size_t i = 0; i < a.columns_.size(); ++i) {
    const auto& x = a.columns_[i];
    const auto& y = b.columns_[i];
    if (x.name != y.name || x.dtype != y.dtype) return false;
    if ((x.nested == nullptr) != (y.nested == nullptr)) return false;
    if (x.nested && !(*x.nested == *y.nested)) return false;
  }
  return true;
}

namespace {
template <class T>
const T& expect(const Cell& c, DType want) {
  if (const T* v = std::get_if<T>(&c)) return *v;
  throw Error(ErrorCode::SchemaMismatch,
              "expected " + std::string(dtypeName(want)) + " cell, got " +
                  (isNull(c) ? std::string("null") : std::string(dtypeName(cellKind(c)))));
}
}  // namespace

int64_t asInt(const Cell& c) { return expect<int64_t>(c, DType::Int64); }
double asDouble(const Cell& c) {
  if (const auto* i = std::get_if<int64_t>(&c)) return static_cast<double>(*i);
  return expect<double>(c, DType::Float64);
}
bool asBool(const Cell& c) { return expect<bool>(c, DType::Bool); }
const std::string& asString(const Cell& c) { return expect<std::string>(c, DType::String); }
const FloatVector& asVector(const Cell& c) { return expect<FloatVector>(c, DType::FloatVector); }
const ImageRecord& asImage(const Cell& c) { return expect<ImageRecord>(c, DType::Image); }
Timestamp asTimestamp(const Cell& c) { return expect<Timestamp>(c, DType::Timestamp); }
const std::vector<Row>& asRows(const Cell& c) {
  const auto& v = expect<RowListValue>(c, DType::RowList);
  static const std::vector<Row> kEmpty;
  return v.rows ? *v.rows : kEmpty;
}

Row appendCell(const Row& row, Cell cell) {
  Row out;
  out.values.reserve(row.size() + 1);
  out.values = row.values;
  out.values.push_back(std::move(cell));
  return out;
}

}  // namespace tundra
