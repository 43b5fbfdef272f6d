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

#include <vector>

#include "json.hpp"
#include "tundra/dataframe/value.hpp"

namespace tundra {

// Int64, Float64, Bool and String map to the JSON scalars (non-finite floats
// become "nan", "inf" or "-inf"), Timestamp to its seconds, FloatVector to a
// number array, Bytes to base64, Image to {path, width, height, mode, data}
// with base64 pixels, RowList to an array of row arrays, Null to null.
nlohmann::ordered_json cellToJson(const Cell& cell);
nlohmann::ordered_json schemaToJson(const Schema& schema);
nlohmann::ordered_json rowsToJson(const std::vector<Row>& rows);

}  // namespace tundra
