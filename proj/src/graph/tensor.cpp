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

#include "tundra/graph/tensor.hpp"

#include <cstring>

#include "tundra/common/error.hpp"

namespace tundra {

int64_t shapeSize(const Shape& s) {
  int64_t n = 1;
  for (int d : s) n *= d;
  return n;
}

std::string shapeString(const Shape& s) {
  std::string out = "[";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "]";
}

Tensor::Tensor(Shape s) : shape(std::move(s)) {
  for (int d : shape) {
    if (d < 1) throw Error(ErrorCode::ShapeMismatch, "tensor dims must be >= 1: " + shapeString(shape));
  }
  data.assign(static_cast<size_t>(shapeSize(shape)), 0.0f);
}

Tensor::Tensor(Shape s, std::vector<float> values) : shape(std::move(s)), data(std::move(values)) {
  for (int d : shape) {
    if (d < 1) throw Error(ErrorCode::ShapeMismatch, "tensor dims must be >= 1: " + shapeString(shape));
  }
  if (static_cast<int64_t>(data.size()) != shapeSize(shape)) {
    throw Error(ErrorCode::ShapeMismatch, "tensor of shape " + shapeString(shape) + " given " +
                                              std::to_string(data.size()) + " values");
  }
}

bool Tensor::sameBits(const Tensor& other) const {
  return shape == other.shape && data.size() == other.data.size() &&
         (data.empty() ||
          std::memcmp(data.data(), other.data.data(), data.size() * sizeof(float)) == 0);
}

}  // namespace tundra
