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

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tundra/pipeline/stage.hpp"

namespace tundra {

// Builds a stage from params and (for fitted models) its serialized state.
using StageFactory =
    std::function<StagePtr(const ParamMap& params, std::span<const uint8_t> state)>;

class StageRegistry {
 public:
  // Throws InvalidArgument on a duplicate name; InvalidParam on a bad
  // descriptor.
  void add(const StageDescriptor& descriptor, StageFactory factory);

  bool contains(std::string_view name) const;
  // Throws UnknownStageName.
  const StageDescriptor& describe(std::string_view name) const;
  StagePtr create(std::string_view name, const ParamMap& params = {},
                  std::span<const uint8_t> state = {}) const;

  // Sorted by name.
  std::vector<std::string> names() const;
  std::vector<const StageDescriptor*> descriptors() const;

  // Machine-readable listing of every stage and param. Byte-identical for an
  // identical registry.
  std::string document() const;

 private:
  struct Entry {
    const StageDescriptor* descriptor;
    StageFactory factory;
  };
  std::map<std::string, Entry, std::less<>> entries_;
};

// Factory for stages without learned state.
template <class S>
StageFactory statelessFactory() {
  return [](const ParamMap& params, std::span<const uint8_t> state) -> StagePtr {
    if (!state.empty()) {
      throw Error(ErrorCode::CorruptStageFile,
                  S::describe().name + " carries no state, found " + std::to_string(state.size()) +
                      " bytes");
    }
    return std::make_shared<S>(params);
  };
}

}  // namespace tundra
