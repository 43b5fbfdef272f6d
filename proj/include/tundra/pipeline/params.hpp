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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tundra/common/error.hpp"

namespace tundra {

enum class ParamKind { Int, Float, Bool, String, StringList, FloatList, Path, Column };

std::string_view paramKindName(ParamKind k);
std::optional<ParamKind> parseParamKind(std::string_view name);

using StringList = std::vector<std::string>;
using FloatList = std::vector<double>;

// Path and Column params hold a std::string.
using ParamValue = std::variant<int64_t, double, bool, std::string, StringList, FloatList>;

bool valueMatchesKind(const ParamValue& v, ParamKind k);
std::string describeValue(const ParamValue& v);

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::String;
  std::optional<ParamValue> defaultValue;
  std::string doc;

  friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

using ParamMap = std::map<std::string, ParamValue>;

enum class StageKind { Estimator, Transformer };

std::string_view stageKindName(StageKind k);

struct StageDescriptor {
  std::string name;
  StageKind kind = StageKind::Transformer;
  std::string doc;
  std::vector<ParamSpec> params;

  const ParamSpec* find(std::string_view param) const;
  // Checks unique names and kind-correct defaults. Throws InvalidParam.
  void validate() const;

  friend bool operator==(const StageDescriptor&, const StageDescriptor&) = default;
};

// Checks every entry against the descriptor. Int values are accepted for
// Float params and converted. Throws InvalidParam.
ParamMap checkParams(const StageDescriptor& desc, ParamMap params);

}  // namespace tundra
