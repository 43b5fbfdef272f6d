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
#include <map>
#include <memory>
#include <mutex>

#include "tundra/graph/graph.hpp"
#include "tundra/pipeline/registry.hpp"

namespace tundra {

// Accepts a graph manifest (blob alongside) or a packed bundle file.
std::vector<uint8_t> readModelBundle(const std::filesystem::path& path);

struct NetworkLoadMetrics {
  uint64_t jobId = 0;
  std::map<int, int> materializationsPerWorker;
  int totalMaterializations = 0;
  int64_t batches = 0;
};

// Evaluates a computation graph over a FloatVector column, one mini-batch at
// a time. The graph is broadcast once per transform and materialized at most
// once per worker per job.
class NetworkModel : public StageImpl<NetworkModel, Transformer> {
 public:
  explicit NetworkModel(ParamMap params = {});
  static const StageDescriptor& describe();

  Schema transformSchema(const Schema& in) const override;
  Dataset transform(const Dataset& ds) const override;

  // Input vector length and output vector length. Throw InvalidParam before
  // a model is configured.
  size_t inputSize() const;
  size_t outputSize() const;
  const Shape& inputShape() const;

  // Counters for the most recent job that executed this stage. Throws
  // NoJobYet before any.
  NetworkLoadMetrics loadMetrics() const;

  struct Loaded;
  struct Stats;

 protected:
  void validateParams() const override;

 private:
  const Loaded& loaded() const;

  mutable std::shared_ptr<const Loaded> loaded_;
  mutable std::shared_ptr<Stats> stats_;
};

void registerNetworkStages(StageRegistry& registry);

}  // namespace tundra
