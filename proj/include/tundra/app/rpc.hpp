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
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "json.hpp"
#include "tundra/dataframe/dataset.hpp"
#include "tundra/pipeline/registry.hpp"

namespace tundra {

// Line-delimited JSON-RPC over a stream pair. Each request is one line
//
//   {"id": <int>, "method": <string>, "params": {...}}
//
// and gets exactly one response line, either
//
//   {"id": <int>, "ok": true, "result": {...}}
//   {"id": <int>, "ok": false, "error": {"code": <ErrorCode name>, "message": ..}}
//
// Methods:
//   describeStages                          -> {version, stages}
//   createStage {stageName, params?}        -> {handle, stageName, kind, params}
//   setParams   {handle, params}            -> {handle, stageName, kind, params}
//   getParams   {handle}                    -> {handle, stageName, kind, params}
//   fit         {handle, data}              -> {handle, stageName, kind, params}
//   transform   {handle, data}              -> {data, schema}
//   readImages  {dir, partitions?}          -> {data, schema}
//   readTable   {path, partitions?}         -> {data, schema}
//   count       {data}                      -> {count}
//   collect     {data, limit?}              -> {schema, rows}
//   savePipeline {handles, path}            -> {path, fitted}
//   shutdown                                -> {}
//
// Handles are opaque strings valid for the server's lifetime. setParams
// returns a new handle; the old one keeps its params. savePipeline writes a
// fitted-pipeline directory when every stage is a transformer and a pipeline
// spec file otherwise.
class RpcServer {
 public:
  explicit RpcServer(std::shared_ptr<Engine> engine,
                     const StageRegistry& registry);
  explicit RpcServer(std::shared_ptr<Engine> engine);

  std::string handle(std::string_view line);
  // Serves until end of input or shutdown. Returns the number of requests.
  int64_t serve(std::istream& in, std::ostream& out);

  bool shutdownRequested() const { return shutdown_; }

 private:
  nlohmann::ordered_json dispatch(const std::string& method, const nlohmann::json& params);
  nlohmann::ordered_json describeStage(const std::string& handle) const;
  std::string putStage(StagePtr stage);
  std::string putData(Dataset ds);
  const StagePtr& stage(const nlohmann::json& params, const char* key) const;
  const Dataset& data(const nlohmann::json& params, const char* key) const;

  std::shared_ptr<Engine> engine_;
  const StageRegistry& registry_;
  std::map<std::string, StagePtr> stages_;
  std::map<std::string, Dataset> datasets_;
  uint64_t nextId_ = 1;
  bool shutdown_ = false;
};

}  // namespace tundra
