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

#include "tundra/pipeline/registry.hpp"

#include "tundra/pipeline/serialize.hpp"

namespace tundra {

void StageRegistry::add(const StageDescriptor& descriptor, StageFactory factory) {
  descriptor.validate();
  if (entries_.count(descriptor.name)) {
    throw Error(ErrorCode::InvalidArgument, "stage '" + descriptor.name + "' registered twice");
  }
  entries_.emplace(descriptor.name, Entry{&descriptor, std::move(factory)});
}

bool StageRegistry::contains(std::string_view name) const { return entries_.count(name) > 0; }

const StageDescriptor& StageRegistry::describe(std::string_view name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw Error(ErrorCode::UnknownStageName, "no stage named '" + std::string(name) + "'");
  }
  return *it->second.descriptor;
}

StagePtr StageRegistry::create(std::string_view name, const ParamMap& params,
                               std::span<const uint8_t> state) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw Error(ErrorCode::UnknownStageName, "no stage named '" + std::string(name) + "'");
  }
  return it->second.factory(params, state);
}

std::vector<std::string> StageRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

std::vector<const StageDescriptor*> StageRegistry::descriptors() const {
  std::vector<const StageDescriptor*> out;
  for (const auto& [_, e] : entries_) out.push_back(e.descriptor);
  return out;
}

std::string StageRegistry::document() const {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& [_, e] : entries_) stages.push_back(descriptorToJson(*e.descriptor));
  nlohmann::json doc{{"version", 1}, {"stages", std::move(stages)}};
  return doc.dump(2) + "\n";
}

}  // namespace tundra
