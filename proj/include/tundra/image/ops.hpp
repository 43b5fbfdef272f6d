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
#include <string_view>
#include <variant>
#include <vector>

#include "tundra/dataframe/value.hpp"

namespace tundra {

enum class ImageOpKind { Resize, FlipHorizontal, Grayscale, CropCenter, Normalize, ToVector };
enum class ResizeMethod { Nearest, Bilinear };

struct ImageOp {
  ImageOpKind kind = ImageOpKind::FlipHorizontal;
  int width = 0;
  int height = 0;
  ResizeMethod method = ResizeMethod::Bilinear;
  double scale = 1.0 / 255.0;
  double offset = 0.0;

  static ImageOp resize(int w, int h, ResizeMethod m = ResizeMethod::Bilinear);
  static ImageOp flipHorizontal();
  static ImageOp grayscale();
  static ImageOp cropCenter(int w, int h);
  static ImageOp normalize(double scale = 1.0 / 255.0, double offset = 0.0);
  static ImageOp toVector();

  // Text form used in stage params:
  //   resize:W:H[:nearest|bilinear]  cropCenter:W:H  flipHorizontal
  //   grayscale  normalize[:SCALE:OFFSET]  toVector
  static ImageOp parse(std::string_view text);
  std::string text() const;

  friend bool operator==(const ImageOp&, const ImageOp&) = default;
};

// Rules: toVector appears at most once and last; normalize appears at most
// once and immediately before toVector. A toVector without normalize scales
// by 1/255.
class ImageOpChain {
 public:
  ImageOpChain() = default;
  // Throws InvalidChain.
  explicit ImageOpChain(std::vector<ImageOp> ops);
  static ImageOpChain parse(const std::vector<std::string>& ops);

  const std::vector<ImageOp>& ops() const { return ops_; }
  std::vector<std::string> text() const;
  bool producesVector() const { return !ops_.empty() && ops_.back().kind == ImageOpKind::ToVector; }
  // Output dimensions for an input of the given size and mode; throws
  // CropOutOfBounds when a crop does not fit.
  struct OutputShape {
    int width = 0;
    int height = 0;
    ImageMode mode = ImageMode::Gray8;
    size_t vectorSize() const { return static_cast<size_t>(width) * height * channelsFor(mode); }
  };
  OutputShape outputShape(int width, int height, ImageMode mode) const;

 private:
  std::vector<ImageOp> ops_;
};

using ChainOutput = std::variant<ImageRecord, FloatVector>;

// Fused evaluation: geometric selections and grayscale run as one pass over
// composed coordinate maps; bilinear resampling is a materialization point.
ChainOutput applyChain(const ImageRecord& img, const ImageOpChain& chain);
// Reference evaluation, one op at a time.
ChainOutput applyChainSequential(const ImageRecord& img, const ImageOpChain& chain);

// Single image-to-image ops (normalize and toVector excluded).
ImageRecord applyOp(const ImageRecord& img, const ImageOp& op);
ImageRecord flipHorizontal(const ImageRecord& img);

uint8_t luma(uint8_t r, uint8_t g, uint8_t b);

}  // namespace tundra
