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

#include "tundra/image/ops.hpp"
#include "tundra/network/network_model.hpp"
#include "tundra/pipeline/registry.hpp"

namespace tundra {

// Applies an op chain to every image of a column. The output column holds
// images, or vectors when the chain ends in toVector. An output column that
// already exists is replaced in place.
class ImageTransformer : public StageImpl<ImageTransformer, Transformer> {
 public:
  explicit ImageTransformer(ParamMap params = {});
  static const StageDescriptor& describe();

  ImageOpChain chain() const;
  Schema transformSchema(const Schema& in) const override;
  Dataset transform(const Dataset& ds) const override;

 protected:
  void validateParams() const override;
};

// Emits every row twice: as is with parity 0, then horizontally flipped with
// parity 1. Both copies carry the same origin id. The id is the image path,
// or a content hash for images without one; an existing origin column is
// copied through.
class ImageSetAugmenter : public StageImpl<ImageSetAugmenter, Transformer> {
 public:
  explicit ImageSetAugmenter(ParamMap params = {});
  static const StageDescriptor& describe();

  Schema transformSchema(const Schema& in) const override;
  Dataset transform(const Dataset& ds) const override;

 protected:
  void validateParams() const override;
};

std::string imageOriginId(const ImageRecord& img);

// [grayscale when the model takes one channel, bilinear resize, normalize,
// toVector] followed by a NetworkModel. Resize dimensions must match the
// model input.
class ImageFeaturizer : public StageImpl<ImageFeaturizer, Transformer> {
 public:
  explicit ImageFeaturizer(ParamMap params = {});
  static const StageDescriptor& describe();

  Schema transformSchema(const Schema& in) const override;
  Dataset transform(const Dataset& ds) const override;

  // The two component stages; throw InvalidParam before a model is set.
  const ImageTransformer& preprocessor() const;
  const NetworkModel& network() const;

 protected:
  void validateParams() const override;

 private:
  std::string scratchColumn() const;

  mutable std::shared_ptr<const ImageTransformer> pre_;
  mutable std::shared_ptr<const NetworkModel> net_;
};

void registerImageStages(StageRegistry& registry);

}  // namespace tundra
