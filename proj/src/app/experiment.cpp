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

#include "tundra/app/experiment.hpp"

#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "tundra/common/bytes.hpp"
#include "tundra/common/hash.hpp"
#include "tundra/graph/model_io.hpp"
#include "tundra/graph/reference_net.hpp"
#include "tundra/image/reader.hpp"
#include "tundra/image/stages.hpp"
#include "tundra/learn/grouping.hpp"
#include "tundra/learn/logistic.hpp"

namespace tundra {

namespace fs = std::filesystem;

VariantSpec VariantSpec::parse(std::string_view text) {
  VariantSpec v;
  v.name = std::string(text);
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == '+') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  v.base = parts[0];
  if (v.base != "LR120" && v.base != "RN1" && v.base != "RN2") {
    throw Error(ErrorCode::InvalidArgument, "unknown variant '" + v.name + "'");
  }
  size_t i = 1;
  if (i < parts.size() && parts[i] == "A") v.augment = true, ++i;
  if (i < parts.size() && parts[i] == "E") v.ensemble = true, ++i;
  if (i != parts.size()) throw Error(ErrorCode::InvalidArgument, "unknown variant '" + v.name + "'");
  return v;
}

namespace {

constexpr const char* kFeatures = "features";
constexpr const char* kScore = "score";
constexpr const char* kLabel = "label";
constexpr const char* kParity = "parity";

Dataset featurize(const std::string& base, const Dataset& ds, const std::string& modelPath,
                  const ExperimentOptions& opts) {
  if (base == "LR120") {
    ImageTransformer t({{"outputCol", std::string(kFeatures)},
                        {"ops", StringList{"grayscale", "resize:120:120:bilinear", "toVector"}}});
    return t.transform(ds);
  }
  ImageFeaturizer f({{"outputCol", std::string(kFeatures)},
                     {"modelPath", modelPath},
                     {"outputNode", std::string(base == "RN1" ? kRefFeatRelu : kRefFeat)},
                     {"miniBatchSize", opts.miniBatchSize}});
  return f.transform(ds);
}

Dataset parityZero(const Dataset& ds) {
  if (!ds.schema().has(kParity)) return ds;
  const size_t p = ds.schema().indexOf(kParity);
  return ds.filter([p](const Row& r) { return asInt(r[p]) == 0; });
}

}  // namespace

std::vector<VariantResult> runExperiment(const Dataset& corpus, const std::string& modelPath,
                                         const ExperimentOptions& opts) {
  std::vector<VariantSpec> specs;
  std::set<std::string> seen;
  for (const auto& name : opts.variants) {
    auto spec = VariantSpec::parse(name);
    if (!seen.insert(spec.name).second) {
      throw Error(ErrorCode::InvalidArgument, "variant '" + spec.name + "' listed twice");
    }
    specs.push_back(std::move(spec));
  }
  if (specs.empty()) throw Error(ErrorCode::InvalidArgument, "no variants requested");

  requireColumn(corpus.schema(), kLabel);
  requireColumn(corpus.schema(), "image", DType::Image);
  const size_t labelIdx = corpus.schema().indexOf(kLabel);
  const Dataset data =
      (corpus.numPartitions() == opts.partitions ? corpus : corpus.repartition(opts.partitions))
          .cache();
  const int64_t unlabeled =
      data.filter([labelIdx](const Row& r) { return isNull(r[labelIdx]); }).count();
  if (unlabeled > 0) {
    throw Error(ErrorCode::InvalidArgument,
                std::to_string(unlabeled) + " images have no label");
  }

  std::set<std::string> augmentedBases;
  for (const auto& s : specs) {
    if (s.augment) augmentedBases.insert(s.base);
  }
  std::map<std::string, Dataset> features;
  auto featuresFor = [&](const std::string& base) -> const Dataset& {
    auto it = features.find(base);
    if (it != features.end()) return it->second;
    Dataset input = data;
    if (augmentedBases.count(base)) input = ImageSetAugmenter().transform(data);
    Dataset f = featurize(base, input, modelPath, opts).drop({"image"}).cache();
    return features.emplace(base, f).first->second;
  };

  const uint64_t splitSeed = deriveSeed(opts.seed, "split");
  std::vector<VariantResult> results;
  for (const auto& spec : specs) {
    Dataset all = featuresFor(spec.base);
    if (!spec.augment) all = parityZero(all);
    auto [train, test] = splitByCamera(all, "cameraId", opts.testFraction, splitSeed);

    LogisticRegression lr({{"featuresCol", std::string(kFeatures)},
                           {"labelCol", std::string(kLabel)},
                           {"scoreCol", std::string(kScore)},
                           {"epochs", opts.epochs},
                           {"l2", opts.l2},
                           {"standardize", true},
                           {"learningRate", safeLearningRate(train, kFeatures, opts.l2, true)}});
    auto model = lr.fitModel(train);

    Dataset scored = model->transform(test);
    if (spec.augment) scored = averageByKey(scored, "originId", kScore);
    if (spec.ensemble) {
      scored = averageByKey(assignBursts(scored, "cameraId", "timestamp", opts.gapSeconds),
                            "burstId", kScore);
    }
    scored = parityZero(scored);

    VariantResult r;
    r.spec = spec;
    const Schema& schema = scored.schema();
    const size_t pathCol = schema.indexOf("path");
    const size_t scoreCol = schema.indexOf(kScore);
    const size_t labelCol = schema.indexOf(kLabel);
    const std::optional<size_t> burstCol =
        schema.has("burstId") ? std::optional<size_t>(schema.indexOf("burstId")) : std::nullopt;
    for (const Row& row : scored.collect()) {
      r.scored.push_back({asString(row[pathCol]), burstCol ? asString(row[*burstCol]) : "",
                          asDouble(row[scoreCol]), binaryLabel(row[labelCol])});
    }
    std::vector<double> scores, labels;
    for (const auto& t : r.scored) {
      scores.push_back(t.score);
      labels.push_back(t.label);
    }
    r.roc = rocFromScores(scores, labels);
    r.confusion = confusionFromScores(scores, labels);
    r.trainRows = train.count();
    r.testRows = static_cast<int64_t>(scores.size());
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<VariantResult> runExperiment(std::shared_ptr<Engine> engine, const fs::path& dataDir,
                                         const fs::path& outDir, const ExperimentOptions& opts) {
  for (const auto& name : opts.variants) VariantSpec::parse(name);
  const Dataset corpus = readImages(engine, dataDir, opts.partitions);
  const fs::path modelPath = outDir / "model" / "reference.tgraph";
  saveGraph(buildReferenceNetwork(), modelPath);
  auto results = runExperiment(corpus, modelPath.string(), opts);
  writeExperimentOutputs(outDir, results);
  return results;
}

std::string summaryCsv(const std::vector<VariantResult>& results) {
  std::ostringstream os;
  os << "variant,auc,tp,fp,fn,tn,train_rows,test_rows\n";
  for (const auto& r : results) {
    const auto& c = r.confusion;
    os << r.spec.name << ',' << formatDouble(r.roc.auc) << ',' << c.tp << ',' << c.fp << ','
       << c.fn << ',' << c.tn << ',' << r.trainRows << ',' << r.testRows << '\n';
  }
  return os.str();
}

void writeExperimentOutputs(const fs::path& outDir, const std::vector<VariantResult>& results) {
  fs::create_directories(outDir);
  for (const auto& r : results) {
    writeFileText(outDir / (r.spec.name + ".metrics.json"), metricsDocument(r.roc, r.confusion));
    writeFileText(outDir / (r.spec.name + ".roc.csv"), rocCsv(r.roc));
  }
  writeFileText(outDir / "summary.csv", summaryCsv(results));
}

}  // namespace tundra
