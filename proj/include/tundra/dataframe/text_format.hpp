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

#include <iosfwd>
#include <string>
#include <vector>

#include "tundra/dataframe/value.hpp"

namespace tundra {

// Text interchange for rows:
//
//   column:<name>:<dtype>,column:<name>:<dtype>,...
//   <cell>,<cell>,...
//
// One record per line. Strings are quoted CSV-style when they contain a comma,
// quote or line break; an unquoted empty field is null and `""` is the empty
// string. FloatVector cells are `[f1;f2;...]`, Timestamp cells are UTC
// seconds, Bytes are base64, Image cells are `MODE;width;height;base64;path`.
// Floating point values use the shortest text that round-trips exactly.
struct TextTable {
  Schema schema;
  std::vector<Row> rows;
};

std::string formatSchemaHeader(const Schema& schema);
Schema parseSchemaHeader(const std::string& line);

void writeTextTable(std::ostream& out, const Schema& schema, const std::vector<Row>& rows);
std::string toTextTable(const Schema& schema, const std::vector<Row>& rows);

// Throws ParseError with a line number, or SchemaMismatch.
TextTable readTextTable(std::istream& in);
TextTable parseTextTable(const std::string& text);

}  // namespace tundra
