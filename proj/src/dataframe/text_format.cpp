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

#include "tundra/dataframe/text_format.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "tundra/common/bytes.hpp"
#include "tundra/common/error.hpp"

namespace tundra {

namespace {

bool needsQuotes(std::string_view s) {
  return s.empty() || s.find_first_of(",\"\r\n") != std::string_view::npos;
}

void writeField(std::ostream& out, std::string_view s, bool forceQuote) {
  if (!forceQuote && !needsQuotes(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

std::string formatCell(const Cell& cell, bool& quote) {
  quote = false;
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Null>) {
          return "";
        } else if constexpr (std::is_same_v<T, int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return formatDouble(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          quote = v.empty();
          return v;
        } else if constexpr (std::is_same_v<T, Bytes>) {
          quote = v.data.empty();
          return base64Encode(v.data);
        } else if constexpr (std::is_same_v<T, FloatVector>) {
          std::string s = "[";
          for (size_t i = 0; i < v.size(); ++i) {
            if (i) s += ';';
            s += formatFloat(v[i]);
          }
          return s + "]";
        } else if constexpr (std::is_same_v<T, ImageRecord>) {
          return std::string(imageModeName(v.mode)) + ";" + std::to_string(v.width) + ";" +
                 std::to_string(v.height) + ";" + base64Encode(v.data) + ";" + v.path;
        } else if constexpr (std::is_same_v<T, Timestamp>) {
          return std::to_string(v.seconds);
        } else {
          throw Error(ErrorCode::InvalidArgument, "row-list cells have no text form");
        }
      },
      cell);
}

template <class T>
T parseNumber(std::string_view s, size_t line) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

Cell parseCell(std::string_view s, bool quoted, DType t, size_t line) {
  if (s.empty() && !quoted) return Null{};
  switch (t) {
    case DType::Int64: return parseNumber<int64_t>(s, line);
    case DType::Float64: return parseNumber<double>(s, line);
    case DType::Bool:
      if (s == "true") return true;
      if (s == "false") return false;
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad bool");
    case DType::String: return std::string(s);
    case DType::Bytes: return Bytes{base64Decode(s)};
    case DType::Timestamp: return Timestamp{parseNumber<int64_t>(s, line)};
    case DType::FloatVector: {
      if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad vector");
      }
      FloatVector v;
      auto body = s.substr(1, s.size() - 2);
      while (!body.empty()) {
        auto cut = body.find(';');
        v.push_back(parseNumber<float>(body.substr(0, cut), line));
        if (cut == std::string_view::npos) break;
        body.remove_prefix(cut + 1);
      }
      return v;
    }
    case DType::Image: {
      std::vector<std::string_view> parts;
      std::string_view rest = s;
      for (int i = 0; i < 4; ++i) {
        auto cut = rest.find(';');
        if (cut == std::string_view::npos) {
          throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad image");
        }
        parts.push_back(rest.substr(0, cut));
        rest.remove_prefix(cut + 1);
      }
      auto mode = parseImageMode(parts[0]);
      if (!mode) throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad mode");
      ImageRecord img(parseNumber<int>(parts[1], line), parseNumber<int>(parts[2], line), *mode,
                      std::string(rest));
      img.data = base64Decode(parts[3]);
      if (!img.wellFormed()) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": image size");
      }
      return img;
    }
    case DType::RowList: break;
  }
  throw Error(ErrorCode::ParseError, "row-list columns have no text form");
}

struct Field {
  std::string text;
  bool quoted = false;
};

// Reads one record; returns false at end of input.
bool readRecord(std::istream& in, std::vector<Field>& fields, size_t& line) {
  fields.clear();
  int c = in.peek();
  if (c == EOF) return false;
  Field cur;
  bool inQuotes = false;
  for (;;) {
    c = in.get();
    if (c == EOF) {
      if (inQuotes) throw Error(ErrorCode::ParseError, "unterminated quote at end of input");
      break;
    }
    if (inQuotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          cur.text += '"';
        } else {
          inQuotes = false;
        }
      } else {
        if (c == '\n') ++line;
        cur.text += static_cast<char>(c);
      }
      continue;
    }
    if (c == '"') {
      inQuotes = true;
      cur.quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur = Field{};
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cur.text += static_cast<char>(c);
    }
  }
  fields.push_back(std::move(cur));
  ++line;
  return true;
}

}  // namespace

std::string formatSchemaHeader(const Schema& schema) {
  std::string out;
  for (size_t i = 0; i < schema.size(); ++i) {
    const auto& c = schema.column(i);
    if (c.name.find_first_of(":,\n") != std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "column name '" + c.name + "' has no text form");
    }
    if (c.dtype == DType::RowList) {
      throw Error(ErrorCode::InvalidArgument, "row-list column '" + c.name + "' has no text form");
    }
    if (i) out += ',';
    out += "column:" + c.name + ":" + std::string(dtypeName(c.dtype));
  }
  return out;
}

Schema parseSchemaHeader(const std::string& line) {
  std::vector<Column> cols;
  std::string_view rest = line;
  if (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);
  while (!rest.empty()) {
    auto cut = rest.find(',');
    auto entry = rest.substr(0, cut);
    if (entry.substr(0, 7) != "column:") {
      throw Error(ErrorCode::ParseError, "header entry '" + std::string(entry) + "'");
    }
    entry.remove_prefix(7);
    auto colon = entry.rfind(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "header entry lacks dtype");
    }
    auto dtype = parseDType(entry.substr(colon + 1));
    if (!dtype || *dtype == DType::RowList) {
      throw Error(ErrorCode::ParseError, "unknown dtype '" + std::string(entry.substr(colon + 1)) + "'");
    }
    cols.push_back(Column{std::string(entry.substr(0, colon)), *dtype, nullptr});
    if (cut == std::string_view::npos) break;
    rest.remove_prefix(cut + 1);
  }
  return Schema(std::move(cols));
}

void writeTextTable(std::ostream& out, const Schema& schema, const std::vector<Row>& rows) {
  out << formatSchemaHeader(schema) << '\n';
  for (const auto& row : rows) {
    schema.check(row);
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      bool quote = false;
      auto text = formatCell(row[i], quote);
      if (isNull(row[i])) continue;
      writeField(out, text, quote);
    }
    out << '\n';
  }
}

std::string toTextTable(const Schema& schema, const std::vector<Row>& rows) {
  std::ostringstream out;
  writeTextTable(out, schema, rows);
  return out.str();
}

TextTable readTextTable(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorCode::ParseError, "missing schema header");
  TextTable table{parseSchemaHeader(header), {}};
  std::vector<Field> fields;
  size_t line = 1;
  while (readRecord(in, fields, line)) {
    if (fields.size() == 1 && fields[0].text.empty() && !fields[0].quoted &&
        table.schema.size() != 1) {
      continue;  // blank line
    }
    if (fields.size() != table.schema.size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": expected " +
                                             std::to_string(table.schema.size()) + " fields, got " +
                                             std::to_string(fields.size()));
    }
    Row row;
    for (size_t i = 0; i < fields.size(); ++i) {
      row.values.push_back(
          parseCell(fields[i].text, fields[i].quoted, table.schema.column(i).dtype, line));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

TextTable parseTextTable(const std::string& text) {
  std::istringstream in(text);
  return readTextTable(in);
}

}  // namespace tundra
