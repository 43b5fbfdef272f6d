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

#include "tundra/learn/logistic.hpp"

#include <cmath>

#include "tundra/common/bytes.hpp"

namespace tundra {

namespace {

// Training data split the same way as the source dataset.
struct Shards {
  std::vector<LogisticData> parts;
  size_t dim = 0;
  size_t rows = 0;
};

Shards extract(const Dataset& ds, const std::string& featuresCol, const std::string& labelCol,
               bool needLabels) {
  const size_t f = ds.schema().indexOf(featuresCol, ErrorCode::MissingColumn);
  requireColumn(ds.schema(), featuresCol, DType::FloatVector);
  std::optional<size_t> l;
  if (needLabels) l = ds.schema().indexOf(labelCol, ErrorCode::MissingColumn);
  Shards s;
  bool haveDim = false;
  for (const auto& part : ds.collectPartitions()) {
    LogisticData d;
    for (const auto& row : part.rows) {
      if (isNull(row[f])) throw Error(ErrorCode::DimensionMismatch, "null feature vector");
      const auto& x = asVector(row[f]);
      if (!haveDim) {
        s.dim = x.size();
        haveDim = true;
      } else if (x.size() != s.dim) {
        throw Error(ErrorCode::DimensionMismatch, "feature vectors of length " + std::to_string(s.dim) +
                                                      " and " + std::to_string(x.size()));
      }
      d.features.insert(d.features.end(), x.begin(), x.end());
      if (l) d.labels.push_back(binaryLabel(row[*l]));
      ++d.rows;
    }
    s.rows += d.rows;
    s.parts.push_back(std::move(d));
  }
  for (auto& d : s.parts) d.dim = s.dim;
  return s;
}

// Four interleaved partial sums, combined in a fixed order.
double dot(std::span<const double> w, const float* x) {
  double s[4] = {0, 0, 0, 0};
  const size_t n = w.size();
  size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    for (size_t k = 0; k < 4; ++k) s[k] += w[j + k] * static_cast<double>(x[j + k]);
  }
  for (; j < n; ++j) s[j % 4] += w[j] * static_cast<double>(x[j]);
  return (s[0] + s[1]) + (s[2] + s[3]);
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double binaryLabel(const Cell& c) {
  if (std::holds_alternative<bool>(c)) return std::get<bool>(c) ? 1.0 : 0.0;
  if (std::holds_alternative<int64_t>(c)) {
    const int64_t v = std::get<int64_t>(c);
    if (v == 0 || v == 1) return static_cast<double>(v);
  } else if (std::holds_alternative<double>(c)) {
    const double v = std::get<double>(c);
    if (v == 0.0 || v == 1.0) return v;
  }
  throw Error(ErrorCode::NonBinaryLabel, "labels must be 0 or 1");
}

double logisticLoss(const LogisticData& data, std::span<const double> w, double b, double l2) {
  double loss = 0;
  for (size_t i = 0; i < data.rows; ++i) {
    const double z = b + dot(w, data.features.data() + i * data.dim);
    // log(1 + e^z) - y z, written to avoid overflow.
    const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    loss += softplus - data.labels[i] * z;
  }
  double reg = 0;
  for (double v : w) reg += v * v;
  return (data.rows ? loss / static_cast<double>(data.rows) : 0.0) + 0.5 * l2 * reg;
}

void accumulateGradient(const LogisticData& data, size_t begin, size_t end,
                        std::span<const double> w, double b, std::span<double> gw, double& gb) {
  for (size_t i = begin; i < end; ++i) {
    const float* x = data.features.data() + i * data.dim;
    const double err = sigmoid(b + dot(w, x)) - data.labels[i];
    for (size_t j = 0; j < data.dim; ++j) gw[j] += err * static_cast<double>(x[j]);
    gb += err;
  }
}

void logisticGradient(const LogisticData& data, std::span<const double> w, double b, double l2,
                      std::span<double> gw, double& gb) {
  std::fill(gw.begin(), gw.end(), 0.0);
  gb = 0;
  accumulateGradient(data, 0, data.rows, w, b, gw, gb);
  const double n = static_cast<double>(std::max<size_t>(data.rows, 1));
  for (size_t j = 0; j < gw.size(); ++j) gw[j] = gw[j] / n + l2 * w[j];
  gb /= n;
}

// -------------------------------------------------------------------- model

const StageDescriptor& LogisticRegressionModel::describe() {
  static const StageDescriptor d{
      "LogisticRegressionModel",
      StageKind::Transformer,
      "Appends the logistic score sigmoid(w.x + b) of a feature vector.",
      {{"featuresCol", ParamKind::Column, std::string("features"), "FloatVector input column."},
       {"scoreCol", ParamKind::Column, std::string("score"), "Appended Float64 column."}}};
  return d;
}

LogisticRegressionModel::LogisticRegressionModel(ParamMap params, std::vector<double> weights,
                                                 double bias)
    : StageImpl(describe(), std::move(params)), weights_(std::move(weights)), bias_(bias) {
  finishConfigure();
}

std::shared_ptr<LogisticRegressionModel> LogisticRegressionModel::fromState(
    const ParamMap& params, std::span<const uint8_t> state) {
  if (state.size() < 16) throw Error(ErrorCode::CorruptStageFile, "logistic state is truncated");
  const uint64_t dim = getU64(state, 0);
  if (dim > (state.size() - 16) / 8 || state.size() != 16 + 8 * dim) {
    throw Error(ErrorCode::CorruptStageFile, "logistic state size does not match its dimension");
  }
  std::vector<double> w(dim);
  for (size_t j = 0; j < dim; ++j) w[j] = getF64(state, 8 + 8 * j);
  return std::make_shared<LogisticRegressionModel>(params, std::move(w), getF64(state, 8 + 8 * dim));
}

std::vector<uint8_t> LogisticRegressionModel::stateBytes() const {
  ByteBuffer out;
  putU64(out, weights_.size());
  for (double v : weights_) putF64(out, v);
  putF64(out, bias_);
  return out;
}

double LogisticRegressionModel::score(std::span<const float> x) const {
  if (x.size() != weights_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(weights_.size()) +
                                                  " features, got " + std::to_string(x.size()));
  }
  return sigmoid(bias_ + dot(weights_, x.data()));
}

Schema LogisticRegressionModel::transformSchema(const Schema& in) const {
  requireColumn(in, getString("featuresCol"), DType::FloatVector);
  return in.withColumn({getString("scoreCol"), DType::Float64, nullptr});
}

Dataset LogisticRegressionModel::transform(const Dataset& ds) const {
  Schema out = transformSchema(ds.schema());
  const size_t f = ds.schema().indexOf(getString("featuresCol"));
  auto self = std::static_pointer_cast<const LogisticRegressionModel>(clone());
  return ds.mapPartitions(
      [self, f](const Rows& rows, TaskContext&) {
        Rows res;
        res.reserve(rows.size());
        for (const auto& r : rows) {
          if (isNull(r[f])) throw Error(ErrorCode::DimensionMismatch, "null feature vector");
          res.push_back(appendCell(r, self->score(asVector(r[f]))));
        }
        return res;
      },
      std::move(out), "LogisticRegressionModel");
}

// ---------------------------------------------------------------- estimator

const StageDescriptor& LogisticRegression::describe() {
  static const StageDescriptor d{
      "LogisticRegression",
      StageKind::Estimator,
      "Binary logistic regression fit by full-batch gradient descent.",
      {{"featuresCol", ParamKind::Column, std::string("features"), "FloatVector input column."},
       {"labelCol", ParamKind::Column, std::string("label"), "0/1 label column."},
       {"scoreCol", ParamKind::Column, std::string("score"), "Score column of the fitted model."},
       {"learningRate", ParamKind::Float, 0.1, "Gradient step size."},
       {"epochs", ParamKind::Int, int64_t{100}, "Full passes over the data."},
       {"l2", ParamKind::Float, 1e-4, "L2 penalty on the weights."},
       {"standardize", ParamKind::Bool, false,
        "Fit on z-scored features; the model keeps raw-feature weights."},
       {"seed", ParamKind::Int, int64_t{42}, "Reserved for stochastic variants; fitting is deterministic."}}};
  return d;
}

LogisticRegression::LogisticRegression(ParamMap params) : StageImpl(describe(), std::move(params)) {
  finishConfigure();
}

void LogisticRegression::validateParams() const {
  const double lr = getFloat("learningRate");
  if (!(lr > 0) || !std::isfinite(lr)) throw Error(ErrorCode::InvalidParam, "learningRate must be > 0");
  if (getInt("epochs") < 1) throw Error(ErrorCode::InvalidParam, "epochs must be >= 1");
  const double l2 = getFloat("l2");
  if (!(l2 >= 0) || !std::isfinite(l2)) throw Error(ErrorCode::InvalidParam, "l2 must be >= 0");
}

namespace {

// Rescales every feature to zero mean and unit variance over all rows.
// Constant features become 0 and get scale 0.
void standardizeShards(Shards& data, std::vector<double>& mean, std::vector<double>& scale) {
  const size_t dim = data.dim;
  const double n = static_cast<double>(data.rows);
  mean.assign(dim, 0.0);
  scale.assign(dim, 0.0);
  for (const auto& part : data.parts) {
    for (size_t i = 0; i < part.rows; ++i) {
      for (size_t j = 0; j < dim; ++j) mean[j] += part.features[i * dim + j];
    }
  }
  for (auto& m : mean) m /= n;
  for (const auto& part : data.parts) {
    for (size_t i = 0; i < part.rows; ++i) {
      for (size_t j = 0; j < dim; ++j) {
        const double d = part.features[i * dim + j] - mean[j];
        scale[j] += d * d;
      }
    }
  }
  for (auto& v : scale) v = std::sqrt(v / n);
  for (auto& part : data.parts) {
    for (size_t i = 0; i < part.rows; ++i) {
      for (size_t j = 0; j < dim; ++j) {
        float& x = part.features[i * dim + j];
        x = scale[j] > 0 ? static_cast<float>((x - mean[j]) / scale[j]) : 0.0f;
      }
    }
  }
}

}  // namespace

std::shared_ptr<Transformer> LogisticRegression::fit(const Dataset& ds) const { return fitModel(ds); }

std::shared_ptr<LogisticRegressionModel> LogisticRegression::fitModel(const Dataset& ds,
                                                                      std::vector<double>* losses) const {
  Shards data = extract(ds, getString("featuresCol"), getString("labelCol"), true);
  if (data.rows == 0) throw Error(ErrorCode::FitError, "cannot fit on an empty dataset");
  const bool standardize = getBool("standardize");
  std::vector<double> mean, scale;
  if (standardize) standardizeShards(data, mean, scale);
  const double lr = getFloat("learningRate");
  const double l2 = getFloat("l2");
  const auto epochs = getInt("epochs");
  const size_t dim = data.dim;
  const int parts = static_cast<int>(data.parts.size());
  const double n = static_cast<double>(data.rows);

  std::vector<double> w(dim, 0.0);
  double b = 0.0;
  std::vector<std::vector<double>> partialW(data.parts.size(), std::vector<double>(dim));
  std::vector<double> partialB(data.parts.size());
  std::vector<double> gw(dim);
  for (int64_t epoch = 0; epoch < epochs; ++epoch) {
    ds.engine()->runTasks(parts, [&](int p, TaskContext&) {
      std::fill(partialW[p].begin(), partialW[p].end(), 0.0);
      partialB[p] = 0;
      accumulateGradient(data.parts[p], 0, data.parts[p].rows, w, b, partialW[p], partialB[p]);
    });
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0;
    for (int p = 0; p < parts; ++p) {
      for (size_t j = 0; j < dim; ++j) gw[j] += partialW[p][j];
      gb += partialB[p];
    }
    // Proximal step for the L2 term.
    const double shrink = 1.0 / (1.0 + lr * l2);
    for (size_t j = 0; j < dim; ++j) w[j] = (w[j] - lr * gw[j] / n) * shrink;
    b -= lr * (gb / n);
    if (losses) {
      double total = 0;
      for (const auto& part : data.parts) {
        total += logisticLoss(part, w, b, 0.0) * static_cast<double>(part.rows);
      }
      double reg = 0;
      for (double v : w) reg += v * v;
      losses->push_back(total / n + 0.5 * l2 * reg);
    }
  }
  if (standardize) {
    // Back to the units of the raw features.
    for (size_t j = 0; j < dim; ++j) {
      w[j] = scale[j] > 0 ? w[j] / scale[j] : 0.0;
      b -= w[j] * mean[j];
    }
  }
  return std::make_shared<LogisticRegressionModel>(
      ParamMap{{"featuresCol", getString("featuresCol")}, {"scoreCol", getString("scoreCol")}},
      std::move(w), b);
}

double safeLearningRate(const Dataset& ds, const std::string& featuresCol, double l2,
                        bool standardized) {
  Shards data = extract(ds, featuresCol, "", false);
  if (data.rows == 0) throw Error(ErrorCode::FitError, "cannot size a step on an empty dataset");
  if (standardized) {
    std::vector<double> mean, scale;
    standardizeShards(data, mean, scale);
  }
  // Power iteration for the top eigenvalue of E[x x^T] over x = (features, 1).
  // The logistic loss has curvature at most a quarter of it.
  const size_t dim = data.dim;
  const int parts = static_cast<int>(data.parts.size());
  const double n = static_cast<double>(data.rows);
  std::vector<double> v(dim + 1, 1.0 / std::sqrt(static_cast<double>(dim + 1)));
  std::vector<std::vector<double>> partial(data.parts.size(), std::vector<double>(dim + 1));
  std::vector<double> mv(dim + 1);
  double lambda = 0;
  for (int iter = 0; iter < 100; ++iter) {
    ds.engine()->runTasks(parts, [&](int p, TaskContext&) {
      auto& acc = partial[p];
      std::fill(acc.begin(), acc.end(), 0.0);
      const LogisticData& part = data.parts[p];
      for (size_t i = 0; i < part.rows; ++i) {
        const float* x = part.features.data() + i * dim;
        const double t = dot(std::span<const double>(v.data(), dim), x) + v[dim];
        for (size_t j = 0; j < dim; ++j) acc[j] += t * static_cast<double>(x[j]);
        acc[dim] += t;
      }
    });
    std::fill(mv.begin(), mv.end(), 0.0);
    for (const auto& acc : partial) {
      for (size_t j = 0; j <= dim; ++j) mv[j] += acc[j];
    }
    double rayleigh = 0, norm = 0;
    for (size_t j = 0; j <= dim; ++j) {
      mv[j] /= n;
      rayleigh += v[j] * mv[j];
      norm += mv[j] * mv[j];
    }
    norm = std::sqrt(norm);
    if (norm == 0) break;
    for (size_t j = 0; j <= dim; ++j) v[j] = mv[j] / norm;
    const bool settled = std::abs(rayleigh - lambda) <= 1e-4 * rayleigh;
    lambda = rayleigh;
    if (settled) break;
  }
  const double bound = lambda / 4.0 + l2;
  return bound > 0 ? 1.0 / bound : 1.0;
}

// ---------------------------------------------------------------- assembler

const StageDescriptor& VectorAssembler::describe() {
  static const StageDescriptor d{
      "VectorAssembler",
      StageKind::Transformer,
      "Concatenates numeric and vector columns into one FloatVector.",
      {{"inputCols", ParamKind::StringList, std::nullopt, "Float64, Int64 or FloatVector columns."},
       {"outputCol", ParamKind::Column, std::string("features"), "Appended FloatVector column."}}};
  return d;
}

VectorAssembler::VectorAssembler(ParamMap params) : StageImpl(describe(), std::move(params)) {
  finishConfigure();
}

void VectorAssembler::validateParams() const {
  if (hasParam("inputCols") && getStringList("inputCols").empty()) {
    throw Error(ErrorCode::InvalidParam, "inputCols must not be empty");
  }
}

Schema VectorAssembler::transformSchema(const Schema& in) const {
  for (const auto& c : getStringList("inputCols")) {
    const DType t = requireColumn(in, c).dtype;
    if (t != DType::Float64 && t != DType::Int64 && t != DType::FloatVector) {
      throw Error(ErrorCode::SchemaMismatch, "column '" + c + "' is " + std::string(dtypeName(t)) +
                                                 ", not numeric");
    }
  }
  return in.withColumn({getString("outputCol"), DType::FloatVector, nullptr});
}

Dataset VectorAssembler::transform(const Dataset& ds) const {
  Schema out = transformSchema(ds.schema());
  const auto names = getStringList("inputCols");
  std::vector<size_t> cols;
  for (const auto& c : names) cols.push_back(ds.schema().indexOf(c));
  // Length of each vector column, fixed by the first row that reaches it.
  auto lengths = std::make_shared<std::vector<std::atomic<int64_t>>>(cols.size());
  for (auto& l : *lengths) l.store(-1);
  return ds.mapPartitions(
      [cols, names, lengths](const Rows& rows, TaskContext&) {
        Rows res;
        res.reserve(rows.size());
        std::vector<size_t> offsets(cols.size() + 1);
        for (const auto& r : rows) {
          for (size_t k = 0; k < cols.size(); ++k) {
            const Cell& c = r[cols[k]];
            if (isNull(c)) throw Error(ErrorCode::InvalidArgument, "null in column '" + names[k] + "'");
            size_t len = 1;
            if (std::holds_alternative<FloatVector>(c)) {
              len = std::get<FloatVector>(c).size();
              int64_t expect = -1;
              auto& slot = (*lengths)[k];
              if (!slot.compare_exchange_strong(expect, static_cast<int64_t>(len)) &&
                  expect != static_cast<int64_t>(len)) {
                throw Error(ErrorCode::RaggedVector, "column '" + names[k] + "' has vectors of length " +
                                                         std::to_string(expect) + " and " +
                                                         std::to_string(len));
              }
            }
            offsets[k + 1] = offsets[k] + len;
          }
          FloatVector v(offsets.back());
          for (size_t k = 0; k < cols.size(); ++k) {
            const Cell& c = r[cols[k]];
            if (std::holds_alternative<FloatVector>(c)) {
              const auto& src = std::get<FloatVector>(c);
              std::copy(src.begin(), src.end(), v.begin() + static_cast<std::ptrdiff_t>(offsets[k]));
            } else {
              v[offsets[k]] = static_cast<float>(asDouble(c));
            }
          }
          res.push_back(appendCell(r, std::move(v)));
        }
        return res;
      },
      std::move(out), "VectorAssembler");
}

}  // namespace tundra
