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
#include <string>
#include <vector>

namespace tundra {

using Shape = std::vector<int>;

int64_t shapeSize(const Shape& s);
std::string shapeString(const Shape& s);

// Row-major f32 tensor. Spatial tensors are laid out height, width, channels.
struct Tensor {
  Shape shape;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(Shape s);  // zero-filled
  Tensor(Shape s, std::vector<float> values);

  int64_t size() const { return static_cast<int64_t>(data.size()); }
  bool sameBits(const Tensor& other) const;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

}  // namespace tundra
