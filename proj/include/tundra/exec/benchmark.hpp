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
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "tundra/exec/engine.hpp"

namespace tundra {

struct ScalingPoint {
  int workers = 0;
  double medianMs = 0;
  int runs = 0;
  std::vector<double> samplesMs;
};

// Builds the plan to time on a freshly configured engine.
using PlanFactory = std::function<PlanPtr(const std::shared_ptr<Engine>&)>;

// For each worker count, runs `repetitions` jobs (plus one untimed warm-up
// when `warmup` is set) and reports the median wall time.
std::vector<ScalingPoint> benchmarkScaling(const PlanFactory& task,
                                           const std::vector<int>& workerCounts, int repetitions,
                                           EngineConfig base = {}, bool warmup = false);

// Header `workers,median_ms,runs`.
void writeScalingCsv(std::ostream& out, const std::vector<ScalingPoint>& points);

double median(std::vector<double> values);

}  // namespace tundra
