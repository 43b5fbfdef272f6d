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

#include "tundra/pipeline/stage.hpp"

namespace tundra {

PipelineStage::PipelineStage(const StageDescriptor& desc, ParamMap params)
    : desc_(&desc), params_(checkParams(desc, std::move(params))) {}

void PipelineStage::finishConfigure() const { validateParams(); }

bool PipelineStage::hasParam(std::string_view name) const {
  if (params_.count(std::string(name))) return true;
  const ParamSpec* spec = desc_->find(name);
  return spec && spec->defaultValue.has_value();
}

ParamValue PipelineStage::param(std::string_view name) const {
  auto it = params_.find(std::string(name));
  if (it != params_.end()) return it->second;
  const ParamSpec* spec = desc_->find(name);
  if (!spec) {
    throw Error(ErrorCode::InvalidParam, stageName() + " has no param '" + std::string(name) + "'");
  }
  if (!spec->defaultValue) {
    throw Error(ErrorCode::InvalidParam,
                stageName() + "." + std::string(name) + " is required but not set");
  }
  return *spec->defaultValue;
}

ParamMap PipelineStage::effectiveParams() const {
  ParamMap out;
  for (const auto& spec : desc_->params) {
    if (spec.defaultValue) out[spec.name] = *spec.defaultValue;
  }
  for (const auto& [k, v] : params_) out[k] = v;
  return out;
}

int64_t PipelineStage::getInt(std::string_view name) const { return std::get<int64_t>(param(name)); }
double PipelineStage::getFloat(std::string_view name) const { return std::get<double>(param(name)); }
bool PipelineStage::getBool(std::string_view name) const { return std::get<bool>(param(name)); }
std::string PipelineStage::getString(std::string_view name) const {
  return std::get<std::string>(param(name));
}
StringList PipelineStage::getStringList(std::string_view name) const {
  return std::get<StringList>(param(name));
}
FloatList PipelineStage::getFloatList(std::string_view name) const {
  return std::get<FloatList>(param(name));
}

std::shared_ptr<PipelineStage> PipelineStage::withParams(const ParamMap& updates) const {
  auto copy = clone();
  ParamMap merged = params_;
  for (const auto& [k, v] : checkParams(*desc_, updates)) merged[k] = v;
  copy->params_ = std::move(merged);
  copy->validateParams();
  return copy;
}

std::shared_ptr<Transformer> asTransformer(const StagePtr& stage) {
  return std::dynamic_pointer_cast<Transformer>(stage);
}

std::shared_ptr<Estimator> asEstimator(const StagePtr& stage) {
  return std::dynamic_pointer_cast<Estimator>(stage);
}

const Column& requireColumn(const Schema& schema, const std::string& name,
                            std::optional<DType> dtype) {
  auto idx = schema.find(name);
  if (!idx) throw Error(ErrorCode::MissingColumn, "missing input column '" + name + "'");
  const Column& col = schema.column(*idx);
  if (dtype && col.dtype != *dtype) {
    throw Error(ErrorCode::SchemaMismatch, "column '" + name + "' is " +
                                               std::string(dtypeName(col.dtype)) + ", expected " +
                                               std::string(dtypeName(*dtype)));
  }
  return col;
}

PipelineModel::PipelineModel(std::vector<TransformerPtr> stages) : stages_(std::move(stages)) {
  if (stages_.empty()) throw Error(ErrorCode::EmptyPipeline, "pipeline model has no stages");
}

Schema PipelineModel::transformSchema(const Schema& in) const {
  Schema s = in;
  for (const auto& t : stages_) s = t->transformSchema(s);
  return s;
}

Dataset PipelineModel::transform(const Dataset& ds) const {
  Dataset cur = ds;
  for (const auto& t : stages_) cur = t->transform(cur);
  return cur;
}

Pipeline::Pipeline(std::vector<StagePtr> stages) : stages_(std::move(stages)) {
  if (stages_.empty()) throw Error(ErrorCode::EmptyPipeline, "a pipeline needs at least one stage");
  for (const auto& s : stages_) {
    if (!s) throw Error(ErrorCode::InvalidArgument, "null pipeline stage");
  }
}

PipelineModel Pipeline::fit(const Dataset& ds) const {
  std::vector<TransformerPtr> fitted;
  Dataset cur = ds;
  for (size_t i = 0; i < stages_.size(); ++i) {
    try {
      TransformerPtr t;
      if (auto est = asEstimator(stages_[i])) {
        t = est->fit(cur);
      } else {
        t = asTransformer(stages_[i]);
      }
      if (!t) throw Error(ErrorCode::FitError, "stage produced no transformer");
      cur = t->transform(cur);
      fitted.push_back(std::move(t));
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError(i, e.code(),
                       stages_[i]->stageName() + ": " + e.what());
    }
  }
  return PipelineModel(std::move(fitted));
}

}  // namespace tundra
