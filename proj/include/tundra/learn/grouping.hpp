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

#include <string>
#include <utility>

#include "tundra/pipeline/registry.hpp"

namespace tundra {

// Within each camera, rows sorted by timestamp start a new burst whenever
// the gap to the previous row exceeds `gapSeconds`. Appends a String column
// `<cameraId>#<ordinal>`. Rows come back grouped by camera.
Dataset assignBursts(const Dataset& ds, const std::string& cameraCol, const std::string& timestampCol,
                     int64_t gapSeconds = 60, const std::string& burstCol = "burstId");

// Replaces every score by the mean score of its key. Groups whose scores
// are all equal keep them unchanged. Rows come back grouped by key.
Dataset averageByKey(const Dataset& ds, const std::string& keyCol, const std::string& scoreCol);

// FNV-1a 64 over the camera id bytes followed by the seed as 8 little-endian
// bytes, reduced mod 10^6 and compared against fraction * 10^6.
bool isTestCamera(std::string_view cameraId, uint64_t seed, double testFraction);

// (train, test). Throws InvalidArgument unless 0 < testFraction < 1.
std::pair<Dataset, Dataset> splitByCamera(const Dataset& ds, const std::string& cameraCol,
                                          double testFraction, uint64_t seed);

class BurstAssigner : public StageImpl<BurstAssigner, Transformer> {
 public:
  explicit BurstAssigner(ParamMap params = {});
  static const StageDescriptor& describe();
  Schema transformSchema(const Schema& in) const override;
  Dataset transform(const Dataset& ds) const override;

 protected:
  void validateParams() const override;
};

class GroupedScoreAverager : public StageImpl<GroupedScoreAverager, Transformer> {
 public:
  explicit GroupedScoreAverager(ParamMap params = {});
  static const StageDescriptor& describe();
  Schema transformSchema(const Schema& in) const override;
  Dataset transform(const Dataset& ds) const override;
};

// LogisticRegression, LogisticRegressionModel, VectorAssembler,
// BurstAssigner and GroupedScoreAverager.
void registerLearnerStages(StageRegistry& registry);

}  // namespace tundra
