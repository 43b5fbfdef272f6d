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

#include "tundra/app/bench.hpp"

#include <random>

#include "tundra/graph/reference_net.hpp"
#include "tundra/image/codec.hpp"
#include "tundra/image/stages.hpp"

namespace tundra {

std::vector<std::vector<uint8_t>> scalingImages(int n, uint64_t seed) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "image count must be >= 0");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<uint8_t>> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    ImageRecord img;
    img.path = "bench/" + std::to_string(i) + ".pgm";
    img.width = kRefSide;
    img.height = kRefSide;
    img.mode = ImageMode::Gray8;
    img.data.resize(static_cast<size_t>(kRefSide) * kRefSide);
    const int base = static_cast<int>(rng() % 160);
    for (auto& px : img.data) px = static_cast<uint8_t>(base + rng() % 96);
    out.push_back(encodeImage(img, ImageFormat::Pgm));
  }
  return out;
}

Dataset decodedImages(std::shared_ptr<Engine> engine,
                      std::shared_ptr<const std::vector<std::vector<uint8_t>>> pgm, int partitions) {
  Schema schema({{"id", DType::Int64}, {"image", DType::Image}});
  return Dataset::fromGenerator(
      std::move(engine), schema, partitions,
      [pgm, partitions](int p, TaskContext&) {
        Rows rows;
        for (size_t i = p; i < pgm->size(); i += partitions) {
          rows.push_back(Row{{static_cast<int64_t>(i), decodeImage((*pgm)[i])}});
        }
        return rows;
      },
      "decodePgm");
}

PlanFactory featurizerWorkload(std::shared_ptr<const std::vector<std::vector<uint8_t>>> pgm,
                               std::string modelPath, int partitions) {
  return [pgm = std::move(pgm), modelPath = std::move(modelPath),
          partitions](const std::shared_ptr<Engine>& engine) {
    ImageFeaturizer featurizer(
        ParamMap{{"modelPath", modelPath}, {"outputNode", std::string(kRefFeat)}});
    return featurizer.transform(decodedImages(engine, pgm, partitions)).plan();
  };
}

}  // namespace tundra
