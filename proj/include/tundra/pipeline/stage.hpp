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
#include <span>
#include <string>
#include <vector>

#include "tundra/dataframe/dataset.hpp"
#include "tundra/pipeline/params.hpp"

namespace tundra {

class Transformer;

// A configured pipeline stage. Instances are immutable once constructed;
// withParams returns a modified copy.
class PipelineStage {
 public:
  virtual ~PipelineStage() = default;

  const StageDescriptor& descriptor() const { return *desc_; }
  const std::string& stageName() const { return desc_->name; }
  StageKind kind() const { return desc_->kind; }

  // Explicitly set params only.
  const ParamMap& params() const { return params_; }
  // Explicit value, else the declared default. Throws InvalidParam when the
  // param has neither.
  ParamValue param(std::string_view name) const;
  bool hasParam(std::string_view name) const;
  // Set values merged over defaults.
  ParamMap effectiveParams() const;

  int64_t getInt(std::string_view name) const;
  double getFloat(std::string_view name) const;
  bool getBool(std::string_view name) const;
  std::string getString(std::string_view name) const;
  StringList getStringList(std::string_view name) const;
  FloatList getFloatList(std::string_view name) const;

  std::shared_ptr<PipelineStage> withParams(const ParamMap& updates) const;

  // Learned state; empty for stateless stages.
  virtual std::vector<uint8_t> stateBytes() const { return {}; }

 protected:
  PipelineStage(const StageDescriptor& desc, ParamMap params);
  PipelineStage(const PipelineStage&) = default;

  virtual std::shared_ptr<PipelineStage> clone() const = 0;
  // Stage-specific checks run after every (re)configuration.
  virtual void validateParams() const {}
  // Runs on construction; call from the concrete constructor.
  void finishConfigure() const;

 private:
  const StageDescriptor* desc_;
  ParamMap params_;
};

class Transformer : public PipelineStage {
 public:
  // Output schema for an input schema. Throws MissingColumn and friends.
  virtual Schema transformSchema(const Schema& in) const = 0;
  virtual Dataset transform(const Dataset& ds) const = 0;

 protected:
  using PipelineStage::PipelineStage;
};

class Estimator : public PipelineStage {
 public:
  virtual std::shared_ptr<Transformer> fit(const Dataset& ds) const = 0;

 protected:
  using PipelineStage::PipelineStage;
};

// Supplies clone() for a concrete stage.
template <class Derived, class Base>
class StageImpl : public Base {
 protected:
  using Base::Base;
  std::shared_ptr<PipelineStage> clone() const override {
    return std::make_shared<Derived>(static_cast<const Derived&>(*this));
  }
};

using StagePtr = std::shared_ptr<PipelineStage>;
using TransformerPtr = std::shared_ptr<Transformer>;

std::shared_ptr<Transformer> asTransformer(const StagePtr& stage);
std::shared_ptr<Estimator> asEstimator(const StagePtr& stage);

// Throws MissingColumn when `name` is absent and SchemaMismatch when its
// dtype differs from the expected one.
const Column& requireColumn(const Schema& schema, const std::string& name,
                            std::optional<DType> dtype = std::nullopt);

class PipelineModel {
 public:
  explicit PipelineModel(std::vector<TransformerPtr> stages);

  const std::vector<TransformerPtr>& stages() const { return stages_; }
  size_t size() const { return stages_.size(); }
  Schema transformSchema(const Schema& in) const;
  Dataset transform(const Dataset& ds) const;

 private:
  std::vector<TransformerPtr> stages_;
};

class Pipeline {
 public:
  // Throws EmptyPipeline.
  explicit Pipeline(std::vector<StagePtr> stages);

  const std::vector<StagePtr>& stages() const { return stages_; }

  // Estimators are fit on the current dataset and replaced by their model;
  // the dataset is advanced through each stage. The first failing stage
  // aborts the fit with a StageError naming it.
  PipelineModel fit(const Dataset& ds) const;

 private:
  std::vector<StagePtr> stages_;
};

}  // namespace tundra
