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

#include "tundra/pipeline/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "tundra/common/bytes.hpp"
#include "tundra/common/sha256.hpp"

namespace tundra {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kStageMagic = "TSTAGE1\n";

[[noreturn]] void corrupt(const std::string& why) {
  throw Error(ErrorCode::CorruptStageFile, why);
}

double jsonNumber(const json& j, const std::string& what) {
  if (!j.is_number()) throw Error(ErrorCode::InvalidParam, what + " expects a number");
  return j.get<double>();
}

}  // namespace

json paramToJson(const ParamValue& v) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(x)) return formatDouble(x);
          return x;
        } else if constexpr (std::is_same_v<T, FloatList>) {
          json arr = json::array();
          for (double d : x) arr.push_back(std::isfinite(d) ? json(d) : json(formatDouble(d)));
          return arr;
        } else {
          return x;
        }
      },
      v);
}

ParamValue paramFromJson(const json& j, ParamKind kind) {
  const std::string what(paramKindName(kind));
  switch (kind) {
    case ParamKind::Int:
      if (j.is_number_integer()) return j.get<int64_t>();
      if (j.is_number_float() && std::trunc(j.get<double>()) == j.get<double>()) {
        return static_cast<int64_t>(j.get<double>());
      }
      throw Error(ErrorCode::InvalidParam, "int param expects an integer, got " + j.dump());
    case ParamKind::Float:
      if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "inf" || s == "-inf" || s == "nan") return std::stod(s);
      }
      return jsonNumber(j, what);
    case ParamKind::Bool:
      if (!j.is_boolean()) throw Error(ErrorCode::InvalidParam, "bool param expects true/false");
      return j.get<bool>();
    case ParamKind::String:
    case ParamKind::Path:
    case ParamKind::Column:
      if (!j.is_string()) throw Error(ErrorCode::InvalidParam, what + " param expects a string");
      return j.get<std::string>();
    case ParamKind::StringList: {
      if (!j.is_array()) throw Error(ErrorCode::InvalidParam, "stringList expects an array");
      StringList out;
      for (const auto& e : j) {
        if (!e.is_string()) throw Error(ErrorCode::InvalidParam, "stringList holds strings only");
        out.push_back(e.get<std::string>());
      }
      return out;
    }
    case ParamKind::FloatList: {
      if (!j.is_array()) throw Error(ErrorCode::InvalidParam, "floatList expects an array");
      FloatList out;
      for (const auto& e : j) out.push_back(std::get<double>(paramFromJson(e, ParamKind::Float)));
      return out;
    }
  }
  throw Error(ErrorCode::InvalidParam, "unknown param kind");
}

json paramsToJson(const ParamMap& params) {
  json out = json::object();
  for (const auto& [k, v] : params) out[k] = paramToJson(v);
  return out;
}

ParamMap paramsFromJson(const json& j, const StageDescriptor& desc) {
  if (j.is_null()) return {};
  if (!j.is_object()) throw Error(ErrorCode::InvalidParam, "params must be an object");
  ParamMap out;
  for (const auto& [k, v] : j.items()) {
    const ParamSpec* spec = desc.find(k);
    if (!spec) throw Error(ErrorCode::InvalidParam, desc.name + " has no param '" + k + "'");
    out[k] = paramFromJson(v, spec->kind);
  }
  return out;
}

json descriptorToJson(const StageDescriptor& desc) {
  json params = json::array();
  for (const auto& p : desc.params) {
    params.push_back(json{{"name", p.name},
                          {"kind", std::string(paramKindName(p.kind))},
                          {"default", p.defaultValue ? paramToJson(*p.defaultValue) : json()},
                          {"doc", p.doc}});
  }
  return json{{"name", desc.name},
              {"kind", std::string(stageKindName(desc.kind))},
              {"doc", desc.doc},
              {"params", std::move(params)}};
}

std::vector<uint8_t> serializeStage(const PipelineStage& stage) {
  auto state = stage.stateBytes();
  json manifest{{"stageName", stage.stageName()},
                {"params", paramsToJson(stage.params())},
                {"stateBytes", state.size()},
                {"stateSha256", sha256Hex(state)}};
  std::string head = std::string(kStageMagic) + manifest.dump() + "\n";
  std::vector<uint8_t> out(head.begin(), head.end());
  out.insert(out.end(), state.begin(), state.end());
  return out;
}

StagePtr deserializeStage(std::span<const uint8_t> bytes, const StageRegistry& registry) {
  if (bytes.size() < kStageMagic.size() ||
      std::string_view(reinterpret_cast<const char*>(bytes.data()), kStageMagic.size()) !=
          kStageMagic) {
    corrupt("missing TSTAGE1 header");
  }
  size_t nl = kStageMagic.size();
  while (nl < bytes.size() && bytes[nl] != '\n') ++nl;
  if (nl == bytes.size()) corrupt("truncated stage manifest");
  json manifest;
  try {
    manifest = json::parse(bytes.begin() + kStageMagic.size(), bytes.begin() + nl);
  } catch (const json::exception& e) {
    corrupt(std::string("unreadable stage manifest: ") + e.what());
  }
  if (!manifest.is_object() || !manifest.contains("stageName") ||
      !manifest["stageName"].is_string() || !manifest.contains("stateBytes") ||
      !manifest["stateBytes"].is_number_unsigned() || !manifest.contains("stateSha256")) {
    corrupt("stage manifest lacks required fields");
  }
  auto state = bytes.subspan(nl + 1);
  if (state.size() != manifest["stateBytes"].get<size_t>()) {
    corrupt("state is " + std::to_string(state.size()) + " bytes, manifest says " +
            std::to_string(manifest["stateBytes"].get<size_t>()));
  }
  if (sha256Hex(state) != manifest["stateSha256"].get<std::string>()) {
    corrupt("state checksum mismatch");
  }
  const auto name = manifest["stageName"].get<std::string>();
  const auto& desc = registry.describe(name);
  ParamMap params;
  try {
    params = paramsFromJson(manifest.value("params", json::object()), desc);
  } catch (const Error& e) {
    corrupt(e.what());
  }
  return registry.create(name, params, state);
}

void saveStage(const PipelineStage& stage, const fs::path& path) {
  writeFileBytes(path, serializeStage(stage));
}

StagePtr loadStage(const fs::path& path, const StageRegistry& registry) {
  return deserializeStage(readFileBytes(path), registry);
}

Pipeline parsePipelineSpec(const std::string& text, const StageRegistry& registry) {
  json spec;
  try {
    spec = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("pipeline spec: ") + e.what());
  }
  if (!spec.is_array()) throw Error(ErrorCode::ParseError, "pipeline spec must be a JSON array");
  std::vector<StagePtr> stages;
  for (const auto& entry : spec) {
    if (!entry.is_object() || !entry.contains("stageName") || !entry["stageName"].is_string()) {
      throw Error(ErrorCode::ParseError, "pipeline spec entries need a stageName");
    }
    const auto name = entry["stageName"].get<std::string>();
    const auto& desc = registry.describe(name);
    stages.push_back(registry.create(name, paramsFromJson(entry.value("params", json()), desc)));
  }
  return Pipeline(std::move(stages));
}

Pipeline loadPipelineSpec(const fs::path& path, const StageRegistry& registry) {
  auto bytes = readFileBytes(path);
  return parsePipelineSpec(std::string(bytes.begin(), bytes.end()), registry);
}

std::string pipelineSpecJson(const std::vector<StagePtr>& stages) {
  json out = json::array();
  for (const auto& s : stages) {
    out.push_back(json{{"stageName", s->stageName()}, {"params", paramsToJson(s->params())}});
  }
  return out.dump(2) + "\n";
}

void savePipelineModel(const PipelineModel& model, const fs::path& dir) {
  fs::create_directories(dir);
  json files = json::array();
  for (size_t i = 0; i < model.size(); ++i) {
    char prefix[8];
    std::snprintf(prefix, sizeof prefix, "%03zu", i);
    std::string file = std::string(prefix) + "_" + model.stages()[i]->stageName() + ".tstage";
    saveStage(*model.stages()[i], dir / file);
    files.push_back(file);
  }
  writeFileText(dir / "pipeline.json", json{{"version", 1}, {"stages", files}}.dump(2) + "\n");
}

PipelineModel loadPipelineModel(const fs::path& dir, const StageRegistry& registry) {
  auto bytes = readFileBytes(dir / "pipeline.json");
  json index;
  try {
    index = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    corrupt(std::string("pipeline.json: ") + e.what());
  }
  if (!index.contains("stages") || !index["stages"].is_array()) corrupt("pipeline.json lacks stages");
  std::vector<TransformerPtr> stages;
  for (const auto& f : index["stages"]) {
    if (!f.is_string()) corrupt("pipeline.json stage entries must be file names");
    auto t = asTransformer(loadStage(dir / f.get<std::string>(), registry));
    if (!t) corrupt(f.get<std::string>() + " is not a fitted transformer");
    stages.push_back(std::move(t));
  }
  return PipelineModel(std::move(stages));
}

}  // namespace tundra
