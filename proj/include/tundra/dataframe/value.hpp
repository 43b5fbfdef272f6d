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

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tundra/common/error.hpp"

namespace tundra {

enum class DType : uint8_t {
  Int64,
  Float64,
  Bool,
  String,
  Bytes,
  FloatVector,
  Image,
  Timestamp,
  // Nested list of rows; produced by groupByKey.
  RowList,
};

std::string_view dtypeName(DType t);
std::optional<DType> parseDType(std::string_view name);

struct Timestamp {
  int64_t seconds = 0;
  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

struct Bytes {
  std::vector<uint8_t> data;
  friend bool operator==(const Bytes&, const Bytes&) = default;
};

using FloatVector = std::vector<float>;

enum class ImageMode : uint8_t { Gray8, Rgb8 };

std::string_view imageModeName(ImageMode m);
std::optional<ImageMode> parseImageMode(std::string_view name);
constexpr int channelsFor(ImageMode m) { return m == ImageMode::Gray8 ? 1 : 3; }

// Row-major, channel-interleaved 8-bit image.
struct ImageRecord {
  std::string path;
  int width = 0;
  int height = 0;
  int channels = 1;
  ImageMode mode = ImageMode::Gray8;
  std::vector<uint8_t> data;

  ImageRecord() = default;
  ImageRecord(int w, int h, ImageMode m, std::string origin = {});

  bool wellFormed() const;
  uint8_t at(int x, int y, int c = 0) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  uint8_t& at(int x, int y, int c = 0) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct Row;

// Shared, immutable list of rows held inside a cell.
struct RowListValue {
  std::shared_ptr<const std::vector<Row>> rows;
  friend bool operator==(const RowListValue& a, const RowListValue& b);
};

struct Null {
  friend bool operator==(const Null&, const Null&) = default;
};

using Cell = std::variant<Null, int64_t, double, bool, std::string, Bytes, FloatVector,
                          ImageRecord, Timestamp, RowListValue>;

bool isNull(const Cell& c);
// DType a non-null cell holds.
DType cellKind(const Cell& c);

struct Row {
  std::vector<Cell> values;

  Row() = default;
  explicit Row(std::vector<Cell> v) : values(std::move(v)) {}

  size_t size() const { return values.size(); }
  const Cell& operator[](size_t i) const { return values[i]; }
  friend bool operator==(const Row&, const Row&) = default;
};

class Schema;

struct Column {
  std::string name;
  DType dtype = DType::Int64;
  // Schema of the nested rows for RowList columns.
  std::shared_ptr<const Schema> nested;
};

class Schema {
 public:
  Schema() = default;
  // Throws SchemaMismatch on empty or duplicate column names.
  explicit Schema(std::vector<Column> columns);
  Schema(std::initializer_list<std::pair<std::string, DType>> columns);

  size_t size() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(size_t i) const { return columns_[i]; }

  std::optional<size_t> find(std::string_view name) const;
  // Throws `onMissing` when absent.
  size_t indexOf(std::string_view name, ErrorCode onMissing = ErrorCode::UnknownColumn) const;
  bool has(std::string_view name) const { return find(name).has_value(); }

  Schema withColumn(Column c) const;
  Schema select(const std::vector<std::string>& names) const;
  Schema drop(const std::vector<std::string>& names) const;

  // Null cells conform to every dtype.
  bool conforms(const Row& row) const;
  // Throws SchemaMismatch naming the offending column.
  void check(const Row& row) const;

  friend bool operator==(const Schema& a, const Schema& b);

 private:
  std::vector<Column> columns_;
};

// Convenience accessors; throw SchemaMismatch on a kind mismatch.
int64_t asInt(const Cell& c);
double asDouble(const Cell& c);  // accepts Int64 and Float64
bool asBool(const Cell& c);
const std::string& asString(const Cell& c);
const FloatVector& asVector(const Cell& c);
const ImageRecord& asImage(const Cell& c);
Timestamp asTimestamp(const Cell& c);
const std::vector<Row>& asRows(const Cell& c);

Row appendCell(const Row& row, Cell cell);

}  // namespace tundra
