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

#include "tundra/graph/graph.hpp"

namespace tundra {

// Node names of the reference network.
inline constexpr const char* kRefInput = "data";
inline constexpr const char* kRefFeat = "feat64";            // RN2 cut
inline constexpr const char* kRefFeatRelu = "feat64_relu";   // RN1 cut
inline constexpr const char* kRefProbs = "probs";
inline constexpr int kRefSide = 64;
inline constexpr uint64_t kRefSeed = 42;

// 64x64x1 -> conv2d(3x3,8) -> relu -> maxpool(2x2) -> conv2d(3x3,16) -> relu
// -> maxpool(2x2) -> flatten -> dense(64) -> relu -> dense(2) -> softmax.
// Weights and biases are drawn uniformly from [-0.1, 0.1] with mt19937_64.
ComputationGraph buildReferenceNetwork(uint64_t seed = kRefSeed);

// 6x6x1 -> conv2d(3x3,2) -> relu -> maxpool(2x2) -> flatten -> dense(3) ->
// softmax. Small enough for golden files.
ComputationGraph buildTinyNetwork(uint64_t seed = kRefSeed);

}  // namespace tundra
