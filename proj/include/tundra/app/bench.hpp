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
#include <memory>
#include <string>
#include <vector>

#include "tundra/dataframe/dataset.hpp"
#include "tundra/exec/benchmark.hpp"

namespace tundra {

// `n` random-texture 64x64 grayscale images as PGM files in memory.
std::vector<std::vector<uint8_t>> scalingImages(int n, uint64_t seed);

// Dataset (id Int64, image Image) whose tasks decode `pgm` files, spread
// round-robin over `partitions`.
Dataset decodedImages(std::shared_ptr<Engine> engine,
                      std::shared_ptr<const std::vector<std::vector<uint8_t>>> pgm, int partitions);

// The scaling workload: decode then ImageFeaturizer at the RN2 cut of the
// network at `modelPath`.
PlanFactory featurizerWorkload(std::shared_ptr<const std::vector<std::vector<uint8_t>>> pgm,
                               std::string modelPath, int partitions);

}  // namespace tundra
