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
#include <filesystem>
#include <memory>
#include <vector>

#include "tundra/image/reader.hpp"

namespace tundra {

// Synthetic camera-trap corpus. Each camera shoots bursts of frames a few
// seconds apart; bursts are minutes apart. Leopard bursts are label 1; the
// rest show a goat or an empty scene. Leopards are spotted symmetric shapes
// no brighter on average than the scene around them, goats plain bright
// blobs. Frames within a burst share the scene; the subject drifts and fades
// from frame to frame.
struct CorpusOptions {
  int cameras = 200;
  int burstsPerCamera = 3;
  int burstLength = 4;
  double leopardFraction = 0.1;
  uint64_t seed = 7;
  int width = 64;
  int height = 64;
  int64_t startTime = 1500000000;
};

// Exactly round(leopardFraction * bursts) bursts are leopards.
std::vector<CorpusEntry> generateCorpus(const CorpusOptions& opts, const std::filesystem::path& root);

// Same frames without touching the file system, in path order.
struct SyntheticFrame {
  CorpusEntry entry;
  ImageRecord image;
};
std::vector<SyntheticFrame> synthesizeCorpus(const CorpusOptions& opts);

// The frames as an imageCorpusSchema() dataset, in path order, split the way
// readImages splits files.
Dataset corpusDataset(std::shared_ptr<Engine> engine, const std::vector<SyntheticFrame>& frames,
                      int numPartitions);

}  // namespace tundra
