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

#include "tundra/learn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "tundra/common/bytes.hpp"
#include "tundra/learn/logistic.hpp"

namespace tundra {

namespace {

void checkInputs(const std::vector<double>& scores, const std::vector<double>& labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::InvalidArgument, "scores and labels differ in length");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw Error(ErrorCode::InvalidArgument, "NaN score");
  }
  for (double l : labels) {
    if (l != 0.0 && l != 1.0) throw Error(ErrorCode::NonBinaryLabel, "labels must be 0 or 1");
  }
}

}  // namespace

RocCurve rocFromScores(const std::vector<double>& scores, const std::vector<double>& labels) {
  checkInputs(scores, labels);
  const auto pos = static_cast<int64_t>(std::count(labels.begin(), labels.end(), 1.0));
  const auto neg = static_cast<int64_t>(labels.size()) - pos;
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCode::DegenerateLabels, "ROC needs both classes; got " + std::to_string(pos) +
                                                 " positives and " + std::to_string(neg) + " negatives");
  }
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.push_back({});
  int64_t tp = 0, fp = 0;
  double area = 0;
  for (size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      (labels[order[i]] == 1.0 ? tp : fp)++;
    }
    RocPoint p{s, static_cast<double>(fp) / neg, static_cast<double>(tp) / pos};
    const RocPoint& prev = roc.points.back();
    area += (p.fpr - prev.fpr) * (p.tpr + prev.tpr) / 2.0;
    roc.points.push_back(p);
  }
  roc.auc = std::clamp(area, 0.0, 1.0);
  return roc;
}

ConfusionMatrix confusionFromScores(const std::vector<double>& scores,
                                    const std::vector<double>& labels, double threshold) {
  checkInputs(scores, labels);
  ConfusionMatrix cm;
  for (size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1.0) {
      (predicted ? cm.tp : cm.fn)++;
    } else {
      (predicted ? cm.fp : cm.tn)++;
    }
  }
  const int64_t negatives = cm.tn + cm.fp;
  const int64_t positives = cm.tp + cm.fn;
  cm.missingNegatives = negatives == 0;
  cm.missingPositives = positives == 0;
  if (negatives) {
    cm.normalized[0][0] = static_cast<double>(cm.tn) / negatives;
    cm.normalized[0][1] = static_cast<double>(cm.fp) / negatives;
  }
  if (positives) {
    cm.normalized[1][0] = static_cast<double>(cm.fn) / positives;
    cm.normalized[1][1] = static_cast<double>(cm.tp) / positives;
  }
  return cm;
}

void collectScores(const Dataset& ds, const std::string& scoreCol, const std::string& labelCol,
                   std::vector<double>& scores, std::vector<double>& labels) {
  const size_t s = ds.schema().indexOf(scoreCol, ErrorCode::MissingColumn);
  const size_t l = ds.schema().indexOf(labelCol, ErrorCode::MissingColumn);
  scores.clear();
  labels.clear();
  for (const auto& r : ds.collect()) {
    if (isNull(r[s])) throw Error(ErrorCode::InvalidArgument, "null score");
    scores.push_back(asDouble(r[s]));
    labels.push_back(binaryLabel(r[l]));
  }
}

RocCurve computeROC(const Dataset& ds, const std::string& scoreCol, const std::string& labelCol) {
  std::vector<double> scores, labels;
  collectScores(ds, scoreCol, labelCol, scores, labels);
  return rocFromScores(scores, labels);
}

ConfusionMatrix confusionMatrix(const Dataset& ds, const std::string& scoreCol,
                                const std::string& labelCol, double threshold) {
  std::vector<double> scores, labels;
  collectScores(ds, scoreCol, labelCol, scores, labels);
  return confusionFromScores(scores, labels, threshold);
}

std::string metricsDocument(const RocCurve& roc, const ConfusionMatrix& cm) {
  nlohmann::ordered_json doc;
  doc["auc"] = roc.auc;
  auto points = nlohmann::ordered_json::array();
  for (const auto& p : roc.points) {
    nlohmann::ordered_json j;
    j["threshold"] = std::isinf(p.threshold) ? nlohmann::ordered_json(nullptr)
                                             : nlohmann::ordered_json(p.threshold);
    j["fpr"] = p.fpr;
    j["tpr"] = p.tpr;
    points.push_back(std::move(j));
  }
  doc["rocPoints"] = std::move(points);
  doc["confusion"] = {{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
  doc["normalized"] = {{cm.normalized[0][0], cm.normalized[0][1]},
                       {cm.normalized[1][0], cm.normalized[1][1]}};
  return doc.dump(2) + "\n";
}

std::string rocCsv(const RocCurve& roc) {
  std::string out = "threshold,fpr,tpr\n";
  for (const auto& p : roc.points) {
    out += (std::isinf(p.threshold) ? std::string("inf") : formatDouble(p.threshold)) + "," +
           formatDouble(p.fpr) + "," + formatDouble(p.tpr) + "\n";
  }
  return out;
}

}  // namespace tundra
