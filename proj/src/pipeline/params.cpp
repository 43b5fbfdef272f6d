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

#include "tundra/pipeline/params.hpp"

#include <set>

#include "tundra/common/bytes.hpp"

namespace tundra {

namespace {

constexpr std::pair<ParamKind, std::string_view> kKindNames[] = {
    {ParamKind::Int, "int"},
    {ParamKind::Float, "float"},
    {ParamKind::Bool, "bool"},
    {ParamKind::String, "string"},
    {ParamKind::StringList, "stringList"},
    {ParamKind::FloatList, "floatList"},
    {ParamKind::Path, "path"},
    {ParamKind::Column, "column"},
};

}  // namespace

std::string_view paramKindName(ParamKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<ParamKind> parseParamKind(std::string_view name) {
  for (const auto& [kind, n] : kKindNames) {
    if (n == name) return kind;
  }
  return std::nullopt;
}

std::string_view stageKindName(StageKind k) {
  return k == StageKind::Estimator ? "estimator" : "transformer";
}

bool valueMatchesKind(const ParamValue& v, ParamKind k) {
  switch (k) {
    case ParamKind::Int: return std::holds_alternative<int64_t>(v);
    case ParamKind::Float: return std::holds_alternative<double>(v);
    case ParamKind::Bool: return std::holds_alternative<bool>(v);
    case ParamKind::String:
    case ParamKind::Path:
    case ParamKind::Column: return std::holds_alternative<std::string>(v);
    case ParamKind::StringList: return std::holds_alternative<StringList>(v);
    case ParamKind::FloatList: return std::holds_alternative<FloatList>(v);
  }
  return false;
}

std::string describeValue(const ParamValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return formatDouble(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return "\"" + x + "\"";
        } else if constexpr (std::is_same_v<T, StringList>) {
          std::string s = "[";
          for (size_t i = 0; i < x.size(); ++i) s += (i ? ", \"" : "\"") + x[i] + "\"";
          return s + "]";
        } else {
          std::string s = "[";
          for (size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + formatDouble(x[i]);
          return s + "]";
        }
      },
      v);
}

const ParamSpec* StageDescriptor::find(std::string_view param) const {
  for (const auto& p : params) {
    if (p.name == param) return &p;
  }
  return nullptr;
}

void StageDescriptor::validate() const {
  if (name.empty()) throw Error(ErrorCode::InvalidParam, "stage name is empty");
  std::set<std::string> seen;
  for (const auto& p : params) {
    if (p.name.empty()) throw Error(ErrorCode::InvalidParam, name + ": empty param name");
    if (!seen.insert(p.name).second) {
      throw Error(ErrorCode::InvalidParam, name + ": duplicate param '" + p.name + "'");
    }
    if (p.defaultValue && !valueMatchesKind(*p.defaultValue, p.kind)) {
      throw Error(ErrorCode::InvalidParam,
                  name + "." + p.name + ": default does not match kind " +
                      std::string(paramKindName(p.kind)));
    }
  }
}

ParamMap checkParams(const StageDescriptor& desc, ParamMap params) {
  for (auto& [key, value] : params) {
    const ParamSpec* spec = desc.find(key);
    if (!spec) throw Error(ErrorCode::InvalidParam, desc.name + " has no param '" + key + "'");
    if (spec->kind == ParamKind::Float && std::holds_alternative<int64_t>(value)) {
      value = static_cast<double>(std::get<int64_t>(value));
    }
    if (spec->kind == ParamKind::FloatList && std::holds_alternative<StringList>(value) &&
        std::get<StringList>(value).empty()) {
      value = FloatList{};
    }
    if (!valueMatchesKind(value, spec->kind)) {
      throw Error(ErrorCode::InvalidParam, desc.name + "." + key + " expects " +
                                               std::string(paramKindName(spec->kind)) +
                                               ", got " + describeValue(value));
    }
  }
  return params;
}

}  // namespace tundra
