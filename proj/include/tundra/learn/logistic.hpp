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

#include <span>
#include <vector>

#include "tundra/pipeline/registry.hpp"

namespace tundra {

// Dense training data: `rows` feature vectors of length `dim`, back to back.
struct LogisticData {
  size_t dim = 0;
  size_t rows = 0;
  std::vector<float> features;
  std::vector<double> labels;
};

double sigmoid(double z);

// Mean log-loss plus (l2 / 2) * |w|^2.
double logisticLoss(const LogisticData& data, std::span<const double> w, double b, double l2);

// Unnormalized gradient sums over a slice of rows; `gw` must have dim entries.
void accumulateGradient(const LogisticData& data, size_t begin, size_t end,
                        std::span<const double> w, double b, std::span<double> gw, double& gb);

// Full gradient of logisticLoss.
void logisticGradient(const LogisticData& data, std::span<const double> w, double b, double l2,
                      std::span<double> gw, double& gb);

// Reads a label cell: Int64 or Float64 0/1, or Bool. Throws NonBinaryLabel.
double binaryLabel(const Cell& c);

class LogisticRegressionModel : public StageImpl<LogisticRegressionModel, Transformer> {
 public:
  LogisticRegressionModel(ParamMap params, std::vector<double> weights, double bias);
  static const StageDescriptor& describe();
  // Rebuilds a model from stateBytes(). Throws CorruptStageFile.
  static std::shared_ptr<LogisticRegressionModel> fromState(const ParamMap& params,
                                                            std::span<const uint8_t> state);

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  double score(std::span<const float> x) const;

  Schema transformSchema(const Schema& in) const override;
  Dataset transform(const Dataset& ds) const override;
  // u64 dimension, f64 weights, f64 bias; little endian.
  std::vector<uint8_t> stateBytes() const override;

 private:
  std::vector<double> weights_;
  double bias_;
};

// Full-batch gradient descent from zero weights. Each epoch takes a step on
// the log-loss, then the proximal step of the L2 penalty. Partial gradients
// are computed per partition on the worker pool and summed in partition
// order, so the fitted model does not depend on the worker count.
class LogisticRegression : public StageImpl<LogisticRegression, Estimator> {
 public:
  explicit LogisticRegression(ParamMap params = {});
  static const StageDescriptor& describe();

  std::shared_ptr<Transformer> fit(const Dataset& ds) const override;
  // `losses`, when given, receives the training loss after every epoch.
  std::shared_ptr<LogisticRegressionModel> fitModel(const Dataset& ds,
                                                    std::vector<double>* losses = nullptr) const;

 protected:
  void validateParams() const override;
};

// Step size 1/L for the smoothness bound L = mean |x|^2 / 4 + l2 of the loss.
// Step size below 2/L for the logistic loss, from mean squared feature norms.
// `standardized` sizes the step for a fit with standardize=true.
double safeLearningRate(const Dataset& ds, const std::string& featuresCol, double l2,
                        bool standardized = false);

// Concatenates Float64, Int64 and FloatVector columns in the given order.
class VectorAssembler : public StageImpl<VectorAssembler, Transformer> {
 public:
  explicit VectorAssembler(ParamMap params = {});
  static const StageDescriptor& describe();

  Schema transformSchema(const Schema& in) const override;
  Dataset transform(const Dataset& ds) const override;

 protected:
  void validateParams() const override;
};

}  // namespace tundra
