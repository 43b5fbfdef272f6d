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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tundra/pipeline/registry.hpp"

namespace tundra {

nlohmann::json paramToJson(const ParamValue& v);
// Throws InvalidParam when the JSON value cannot hold `kind`.
ParamValue paramFromJson(const nlohmann::json& j, ParamKind kind);
nlohmann::json paramsToJson(const ParamMap& params);
ParamMap paramsFromJson(const nlohmann::json& j, const StageDescriptor& desc);

nlohmann::json descriptorToJson(const StageDescriptor& desc);

// Stage file layout:
//   TSTAGE1\n
//   {"stageName":..,"params":{..},"stateBytes":N,"stateSha256":".."}\n
//   <N state bytes>
std::vector<uint8_t> serializeStage(const PipelineStage& stage);
// Throws CorruptStageFile / UnknownStageName.
StagePtr deserializeStage(std::span<const uint8_t> bytes, const StageRegistry& registry);
void saveStage(const PipelineStage& stage, const std::filesystem::path& path);
StagePtr loadStage(const std::filesystem::path& path, const StageRegistry& registry);

// Pipeline spec: JSON array of {"stageName": .., "params": {..}}.
Pipeline parsePipelineSpec(const std::string& text, const StageRegistry& registry);
Pipeline loadPipelineSpec(const std::filesystem::path& path, const StageRegistry& registry);
std::string pipelineSpecJson(const std::vector<StagePtr>& stages);

// Fitted pipeline as a directory: pipeline.json listing one stage file per
// stage, in order.
void savePipelineModel(const PipelineModel& model, const std::filesystem::path& dir);
PipelineModel loadPipelineModel(const std::filesystem::path& dir, const StageRegistry& registry);

}  // namespace tundra
