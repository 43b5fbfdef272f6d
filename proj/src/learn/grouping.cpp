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

#include "tundra/learn/grouping.hpp"

#include <algorithm>
#include <cmath>

#include "tundra/common/hash.hpp"
#include "tundra/learn/logistic.hpp"

namespace tundra {

namespace {

int64_t secondsOf(const Cell& c) {
  if (std::holds_alternative<Timestamp>(c)) return std::get<Timestamp>(c).seconds;
  if (std::holds_alternative<int64_t>(c)) return std::get<int64_t>(c);
  throw Error(ErrorCode::InvalidArgument, "missing timestamp");
}

}  // namespace

Dataset assignBursts(const Dataset& ds, const std::string& cameraCol, const std::string& timestampCol,
                     int64_t gapSeconds, const std::string& burstCol) {
  const Schema& in = ds.schema();
  requireColumn(in, cameraCol, DType::String);
  const DType tt = requireColumn(in, timestampCol).dtype;
  if (tt != DType::Timestamp && tt != DType::Int64) {
    throw Error(ErrorCode::SchemaMismatch, "timestamp column must be Timestamp or Int64");
  }
  if (gapSeconds < 0) throw Error(ErrorCode::InvalidArgument, "gapSeconds must be >= 0");
  const size_t ts = in.indexOf(timestampCol);
  const Schema out = in.withColumn({burstCol, DType::String, nullptr});
  const Dataset grouped = ds.groupByKey(cameraCol);
  return grouped.mapPartitions(
      [ts, gapSeconds](const Rows& groups, TaskContext&) {
        Rows res;
        for (const auto& g : groups) {
          const std::string& cam = asString(g[0]);
          std::vector<Row> rows = asRows(g[1]);
          std::stable_sort(rows.begin(), rows.end(), [ts](const Row& a, const Row& b) {
            return secondsOf(a[ts]) < secondsOf(b[ts]);
          });
          int64_t burst = 0;
          for (size_t i = 0; i < rows.size(); ++i) {
            if (i > 0 && secondsOf(rows[i][ts]) - secondsOf(rows[i - 1][ts]) > gapSeconds) ++burst;
            res.push_back(appendCell(rows[i], cam + "#" + std::to_string(burst)));
          }
        }
        return res;
      },
      out, "assignBursts");
}

Dataset averageByKey(const Dataset& ds, const std::string& keyCol, const std::string& scoreCol) {
  requireColumn(ds.schema(), keyCol);
  requireColumn(ds.schema(), scoreCol, DType::Float64);
  const size_t s = ds.schema().indexOf(scoreCol);
  return ds.groupByKey(keyCol).mapPartitions(
      [s](const Rows& groups, TaskContext&) {
        Rows res;
        for (const auto& g : groups) {
          std::vector<Row> rows = asRows(g[1]);
          std::vector<double> scores;
          for (const auto& r : rows) {
            if (isNull(r[s])) throw Error(ErrorCode::InvalidArgument, "null score");
            scores.push_back(asDouble(r[s]));
          }
          const bool uniform = std::all_of(scores.begin(), scores.end(),
                                           [&](double v) { return v == scores.front(); });
          if (!uniform) {
            // Summed in sorted order so the mean does not depend on row order.
            std::sort(scores.begin(), scores.end());
            double sum = 0;
            for (double v : scores) sum += v;
            const double mean = sum / static_cast<double>(scores.size());
            for (auto& r : rows) r.values[s] = mean;
          }
          for (auto& r : rows) res.push_back(std::move(r));
        }
        return res;
      },
      ds.schema(), "averageByKey");
}

bool isTestCamera(std::string_view cameraId, uint64_t seed, double testFraction) {
  uint8_t le[8];
  for (int i = 0; i < 8; ++i) le[i] = static_cast<uint8_t>(seed >> (8 * i));
  const uint64_t h = fnv1a64(std::span<const uint8_t>(le, 8), fnv1a64(cameraId));
  return static_cast<double>(h % 1000000ULL) < testFraction * 1e6;
}

std::pair<Dataset, Dataset> splitByCamera(const Dataset& ds, const std::string& cameraCol,
                                          double testFraction, uint64_t seed) {
  if (!(testFraction > 0.0 && testFraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "testFraction must be in (0, 1)");
  }
  requireColumn(ds.schema(), cameraCol, DType::String);
  const size_t c = ds.schema().indexOf(cameraCol);
  auto test = [c, seed, testFraction](const Row& r) {
    return isTestCamera(asString(r[c]), seed, testFraction);
  };
  return {ds.filter([test](const Row& r) { return !test(r); }), ds.filter(test)};
}

// -------------------------------------------------------------------- stages

const StageDescriptor& BurstAssigner::describe() {
  static const StageDescriptor d{
      "BurstAssigner",
      StageKind::Transformer,
      "Groups each camera's images into bursts separated by more than gapSeconds.",
      {{"cameraCol", ParamKind::Column, std::string("cameraId"), "String camera column."},
       {"timestampCol", ParamKind::Column, std::string("timestamp"), "Timestamp or Int64 column."},
       {"gapSeconds", ParamKind::Int, int64_t{60}, "Largest gap inside one burst."},
       {"burstCol", ParamKind::Column, std::string("burstId"), "Appended String column."}}};
  return d;
}

BurstAssigner::BurstAssigner(ParamMap params) : StageImpl(describe(), std::move(params)) {
  finishConfigure();
}

void BurstAssigner::validateParams() const {
  if (getInt("gapSeconds") < 0) throw Error(ErrorCode::InvalidParam, "gapSeconds must be >= 0");
}

Schema BurstAssigner::transformSchema(const Schema& in) const {
  requireColumn(in, getString("cameraCol"), DType::String);
  requireColumn(in, getString("timestampCol"));
  return in.withColumn({getString("burstCol"), DType::String, nullptr});
}

Dataset BurstAssigner::transform(const Dataset& ds) const {
  return assignBursts(ds, getString("cameraCol"), getString("timestampCol"), getInt("gapSeconds"),
                      getString("burstCol"));
}

const StageDescriptor& GroupedScoreAverager::describe() {
  static const StageDescriptor d{
      "GroupedScoreAverager",
      StageKind::Transformer,
      "Replaces each score by the mean score of rows sharing its key.",
      {{"keyCol", ParamKind::Column, std::string("burstId"), "Grouping column."},
       {"scoreCol", ParamKind::Column, std::string("score"), "Float64 score column."}}};
  return d;
}

GroupedScoreAverager::GroupedScoreAverager(ParamMap params) : StageImpl(describe(), std::move(params)) {
  finishConfigure();
}

Schema GroupedScoreAverager::transformSchema(const Schema& in) const {
  requireColumn(in, getString("keyCol"));
  requireColumn(in, getString("scoreCol"), DType::Float64);
  return in;
}

Dataset GroupedScoreAverager::transform(const Dataset& ds) const {
  return averageByKey(ds, getString("keyCol"), getString("scoreCol"));
}

void registerLearnerStages(StageRegistry& registry) {
  registry.add(LogisticRegression::describe(), statelessFactory<LogisticRegression>());
  registry.add(LogisticRegressionModel::describe(),
               [](const ParamMap& params, std::span<const uint8_t> state) -> StagePtr {
                 return LogisticRegressionModel::fromState(params, state);
               });
  registry.add(VectorAssembler::describe(), statelessFactory<VectorAssembler>());
  registry.add(BurstAssigner::describe(), statelessFactory<BurstAssigner>());
  registry.add(GroupedScoreAverager::describe(), statelessFactory<GroupedScoreAverager>());
}

}  // namespace tundra
