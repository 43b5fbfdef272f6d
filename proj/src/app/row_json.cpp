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

#include "tundra/app/row_json.hpp"

#include <cmath>

#include "tundra/common/bytes.hpp"

namespace tundra {

using ojson = nlohmann::ordered_json;

namespace {

ojson number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

ojson cellToJson(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> ojson {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Null>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          return number(v);
        } else if constexpr (std::is_same_v<T, Bytes>) {
          return base64Encode(v.data);
        } else if constexpr (std::is_same_v<T, FloatVector>) {
          ojson a = ojson::array();
          for (float f : v) a.push_back(number(f));
          return a;
        } else if constexpr (std::is_same_v<T, ImageRecord>) {
          return ojson{{"path", v.path},
                       {"width", v.width},
                       {"height", v.height},
                       {"mode", std::string(imageModeName(v.mode))},
                       {"data", base64Encode(v.data)}};
        } else if constexpr (std::is_same_v<T, Timestamp>) {
          return v.seconds;
        } else if constexpr (std::is_same_v<T, RowListValue>) {
          return v.rows ? rowsToJson(*v.rows) : ojson::array();
        } else {
          return v;
        }
      },
      cell);
}

ojson schemaToJson(const Schema& schema) {
  ojson cols = ojson::array();
  for (const auto& c : schema.columns()) {
    cols.push_back(ojson{{"name", c.name}, {"dtype", std::string(dtypeName(c.dtype))}});
  }
  return cols;
}

ojson rowsToJson(const std::vector<Row>& rows) {
  ojson out = ojson::array();
  for (const auto& r : rows) {
    ojson cells = ojson::array();
    for (const auto& c : r.values) cells.push_back(cellToJson(c));
    out.push_back(std::move(cells));
  }
  return out;
}

}  // namespace tundra
