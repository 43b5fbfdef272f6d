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

#include <limits>
#include <string>
#include <vector>

#include "tundra/dataframe/dataset.hpp"

namespace tundra {

struct RocPoint {
  // +infinity for the first point, where nothing is predicted positive.
  double threshold = std::numeric_limits<double>::infinity();
  double fpr = 0;
  double tpr = 0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0;
};

// One point per distinct score, descending; equal scores form one step. AUC
// by the trapezoidal rule. Throws NonBinaryLabel, DegenerateLabels (a single
// class) and InvalidArgument (NaN score or size mismatch).
RocCurve rocFromScores(const std::vector<double>& scores, const std::vector<double>& labels);
RocCurve computeROC(const Dataset& ds, const std::string& scoreCol, const std::string& labelCol);

struct ConfusionMatrix {
  int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  // normalized[actual][predicted], index 0 negative, 1 positive. A class
  // without support gets a zero row and is flagged.
  double normalized[2][2] = {{0, 0}, {0, 0}};
  bool missingNegatives = false;
  bool missingPositives = false;
};

// score >= threshold predicts positive.
ConfusionMatrix confusionFromScores(const std::vector<double>& scores,
                                    const std::vector<double>& labels, double threshold = 0.5);
ConfusionMatrix confusionMatrix(const Dataset& ds, const std::string& scoreCol,
                                const std::string& labelCol, double threshold = 0.5);

// {"auc", "rocPoints": [{"threshold" (null for +inf), "fpr", "tpr"}],
//  "confusion": {"tp", "fp", "fn", "tn"}, "normalized": [[..], [..]]}
std::string metricsDocument(const RocCurve& roc, const ConfusionMatrix& cm);
// Header `threshold,fpr,tpr`; the first threshold is written as inf.
std::string rocCsv(const RocCurve& roc);

// Score and label columns of a dataset, in collection order.
void collectScores(const Dataset& ds, const std::string& scoreCol, const std::string& labelCol,
                   std::vector<double>& scores, std::vector<double>& labels);

}  // namespace tundra
