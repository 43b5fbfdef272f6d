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

#include "tundra/network/network_model.hpp"

#include <algorithm>

#include "tundra/common/bytes.hpp"
#include "tundra/graph/model_io.hpp"

namespace tundra {

namespace {

constexpr std::string_view kBundleMagic = "TGBNDL1\n";

}  // namespace

std::vector<uint8_t> readModelBundle(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorCode::Io, "model file not found: " + path.string());
  }
  auto bytes = readFileBytes(path);
  if (bytes.size() >= kBundleMagic.size() &&
      std::equal(kBundleMagic.begin(), kBundleMagic.end(), bytes.begin())) {
    return bytes;
  }
  return bundleGraphFiles(path);
}

struct NetworkModel::Loaded {
  std::vector<uint8_t> bundle;
  Shape inputShape;
  std::string outputNode;
  size_t inputSize = 0;
  size_t outputSize = 0;
};

struct NetworkModel::Stats {
  struct Job {
    BroadcastHandle handle;
    std::map<int, int64_t> batchesByPartition;
  };
  std::mutex mu;
  std::map<uint64_t, Job> jobs;
};

const StageDescriptor& NetworkModel::describe() {
  static const StageDescriptor d{
      "NetworkModel",
      StageKind::Transformer,
      "Evaluates a computation graph on a vector column in mini-batches and appends the "
      "flattened value of one node.",
      {{"modelPath", ParamKind::Path, std::nullopt, "Graph manifest or bundle file."},
       {"inputCol", ParamKind::Column, std::string("features"), "FloatVector input column."},
       {"outputCol", ParamKind::Column, std::string("output"), "Appended FloatVector column."},
       {"outputNode", ParamKind::String, std::string(""),
        "Node to read; empty selects the graph output."},
       {"miniBatchSize", ParamKind::Int, int64_t{64}, "Rows per evaluation batch."}}};
  return d;
}

NetworkModel::NetworkModel(ParamMap params) : StageImpl(describe(), std::move(params)) {
  finishConfigure();
}

void NetworkModel::validateParams() const {
  if (getInt("miniBatchSize") < 1) {
    throw Error(ErrorCode::InvalidParam, "miniBatchSize must be >= 1");
  }
  stats_ = std::make_shared<Stats>();
  loaded_.reset();
  if (!hasParam("modelPath")) return;
  auto l = std::make_shared<Loaded>();
  l->bundle = readModelBundle(getString("modelPath"));
  const ComputationGraph g = unbundleGraph(l->bundle);
  l->outputNode = getString("outputNode");
  if (l->outputNode.empty()) l->outputNode = g.outputName();
  if (!g.hasNode(l->outputNode)) {
    throw Error(ErrorCode::UnknownNode, "model has no node '" + l->outputNode + "'");
  }
  l->inputShape = g.inputShape();
  l->inputSize = static_cast<size_t>(shapeSize(l->inputShape));
  l->outputSize = static_cast<size_t>(shapeSize(g.shapeOf(l->outputNode)));
  loaded_ = std::move(l);
}

const NetworkModel::Loaded& NetworkModel::loaded() const {
  if (!loaded_) throw Error(ErrorCode::InvalidParam, "NetworkModel.modelPath is not set");
  return *loaded_;
}

size_t NetworkModel::inputSize() const { return loaded().inputSize; }
size_t NetworkModel::outputSize() const { return loaded().outputSize; }
const Shape& NetworkModel::inputShape() const { return loaded().inputShape; }

Schema NetworkModel::transformSchema(const Schema& in) const {
  loaded();
  requireColumn(in, getString("inputCol"), DType::FloatVector);
  const std::string out = getString("outputCol");
  if (in.has(out)) throw Error(ErrorCode::InvalidParam, "output column '" + out + "' already exists");
  return in.withColumn({out, DType::FloatVector, nullptr});
}

Dataset NetworkModel::transform(const Dataset& ds) const {
  Schema outSchema = transformSchema(ds.schema());
  auto model = loaded_;
  auto stats = stats_;
  BroadcastHandle handle = ds.engine()->broadcast(model->bundle);
  const size_t inCol = ds.schema().indexOf(getString("inputCol"));
  const auto miniBatch = static_cast<size_t>(getInt("miniBatchSize"));

  PartitionFn fn = [=](const Rows& rows, TaskContext& ctx) {
    auto graph = ctx.materialize<ComputationGraph>(handle, [](std::span<const uint8_t> b) {
      return std::make_shared<const ComputationGraph>(unbundleGraph(b));
    });
    Rows out;
    out.reserve(rows.size());
    std::vector<float> batch;
    int64_t batches = 0;
    for (size_t start = 0; start < rows.size(); start += miniBatch) {
      const size_t end = std::min(rows.size(), start + miniBatch);
      batch.clear();
      batch.reserve((end - start) * model->inputSize);
      for (size_t i = start; i < end; ++i) {
        const Cell& c = rows[i][inCol];
        if (isNull(c)) {
          throw Error(ErrorCode::VectorSizeMismatch, "row " + std::to_string(i) + ": null input vector");
        }
        const FloatVector& v = asVector(c);
        if (v.size() != model->inputSize) {
          throw Error(ErrorCode::VectorSizeMismatch,
                      "row " + std::to_string(i) + ": vector of " + std::to_string(v.size()) +
                          " values, model expects " + std::to_string(model->inputSize));
        }
        batch.insert(batch.end(), v.begin(), v.end());
      }
      const auto result =
          graph->evalFlat(batch, static_cast<int64_t>(end - start), model->outputNode);
      ++batches;
      for (size_t i = start; i < end; ++i) {
        const auto first = result.begin() + static_cast<std::ptrdiff_t>((i - start) * model->outputSize);
        out.push_back(appendCell(rows[i], FloatVector(first, first + static_cast<std::ptrdiff_t>(model->outputSize))));
      }
    }
    std::lock_guard lock(stats->mu);
    auto& job = stats->jobs[ctx.jobId()];
    job.handle = handle;
    job.batchesByPartition[ctx.partition()] = batches;
    return out;
  };
  return ds.mapPartitions(std::move(fn), std::move(outSchema), "NetworkModel");
}

NetworkLoadMetrics NetworkModel::loadMetrics() const {
  std::lock_guard lock(stats_->mu);
  if (stats_->jobs.empty()) throw Error(ErrorCode::NoJobYet, "NetworkModel has not run in a job yet");
  const auto& [jobId, job] = *stats_->jobs.rbegin();
  NetworkLoadMetrics m;
  m.jobId = jobId;
  m.materializationsPerWorker = job.handle.materializations();
  for (const auto& [w, n] : m.materializationsPerWorker) m.totalMaterializations += n;
  for (const auto& [p, n] : job.batchesByPartition) m.batches += n;
  return m;
}

void registerNetworkStages(StageRegistry& registry) {
  registry.add(NetworkModel::describe(), statelessFactory<NetworkModel>());
}

}  // namespace tundra
