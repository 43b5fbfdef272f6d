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

#include "tundra/exec/benchmark.hpp"

#include <algorithm>
#include <ostream>

#include "tundra/common/bytes.hpp"
#include "tundra/common/error.hpp"

namespace tundra {

double median(std::vector<double> values) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<ScalingPoint> benchmarkScaling(const PlanFactory& task,
                                           const std::vector<int>& workerCounts, int repetitions,
                                           EngineConfig base, bool warmup) {
  if (workerCounts.empty()) throw Error(ErrorCode::InvalidArgument, "no worker counts given");
  if (repetitions < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be >= 1");
  for (int w : workerCounts) {
    if (w < 1) throw Error(ErrorCode::InvalidArgument, "worker counts must be >= 1");
  }

  std::vector<ScalingPoint> out;
  for (int w : workerCounts) {
    EngineConfig cfg = base;
    cfg.workers = w;
    cfg.minWorkers = 1;
    cfg.maxWorkers = std::max(cfg.maxWorkers, w);
    auto engine = Engine::create(cfg);
    ScalingPoint point;
    point.workers = w;
    if (warmup) engine->runJob(task(engine));
    for (int r = 0; r < repetitions; ++r) {
      auto plan = task(engine);
      point.samplesMs.push_back(engine->runJob(plan).metrics.wallTimeMs);
    }
    point.runs = repetitions;
    point.medianMs = median(point.samplesMs);
    out.push_back(std::move(point));
  }
  return out;
}

void writeScalingCsv(std::ostream& out, const std::vector<ScalingPoint>& points) {
  out << "workers,median_ms,runs\n";
  for (const auto& p : points) {
    out << p.workers << ',' << formatDouble(p.medianMs) << ',' << p.runs << '\n';
  }
}

}  // namespace tundra
