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
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tundra/dataframe/dataset.hpp"
#include "tundra/learn/metrics.hpp"

namespace tundra {

// `<base>[+A][+E]` with base one of LR120, RN1, RN2.
struct VariantSpec {
  std::string name;
  std::string base;
  bool augment = false;
  bool ensemble = false;

  // Throws InvalidArgument.
  static VariantSpec parse(std::string_view text);
};

struct ExperimentOptions {
  uint64_t seed = 7;
  std::vector<std::string> variants = {"LR120", "RN1", "RN2", "RN2+A", "RN2+A+E"};
  double testFraction = 0.2;
  int64_t gapSeconds = 60;
  int partitions = 16;
  int64_t epochs = 100;
  double l2 = 1e-4;
  int64_t miniBatchSize = 64;
};

// One evaluated test image.
struct ScoredImage {
  std::string path;
  // Empty unless the variant ensembles.
  std::string burstId;
  double score = 0;
  double label = 0;
};

struct VariantResult {
  VariantSpec spec;
  std::vector<ScoredImage> scored;
  RocCurve roc;
  ConfusionMatrix confusion;
  int64_t trainRows = 0;
  int64_t testRows = 0;
};

// `corpus` has the imageCorpusSchema() columns. Rows without a label raise
// InvalidArgument.
std::vector<VariantResult> runExperiment(const Dataset& corpus, const std::string& modelPath,
                                         const ExperimentOptions& opts);

// Reads the corpus under `dataDir`, writes the reference network to
// `<outDir>/model/` and the per-variant metrics, ROC CSVs and summary.csv.
std::vector<VariantResult> runExperiment(std::shared_ptr<Engine> engine,
                                         const std::filesystem::path& dataDir,
                                         const std::filesystem::path& outDir,
                                         const ExperimentOptions& opts);

std::string summaryCsv(const std::vector<VariantResult>& results);
void writeExperimentOutputs(const std::filesystem::path& outDir,
                            const std::vector<VariantResult>& results);

}  // namespace tundra
