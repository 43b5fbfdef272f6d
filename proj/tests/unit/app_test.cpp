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

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "support/test_util.hpp"
#include "tundra/app/bench.hpp"
#include "tundra/app/builtin.hpp"
#include "tundra/app/experiment.hpp"
#include "tundra/app/row_json.hpp"
#include "tundra/app/rpc.hpp"
#include "tundra/common/bytes.hpp"
#include "tundra/dataframe/text_format.hpp"
#include "tundra/graph/model_io.hpp"
#include "tundra/graph/reference_net.hpp"
#include "tundra/image/codec.hpp"
#include "tundra/image/corpus.hpp"
#include "tundra/pipeline/serialize.hpp"

namespace tundra {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using testing::codeOf;
using testing::TempDir;
using testing::withWorkers;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

CorpusOptions smallCorpus(uint64_t seed = 3) {
  CorpusOptions o;
  o.cameras = 20;
  o.leopardFraction = 0.2;
  o.seed = seed;
  return o;
}

// ---- variants ----

TEST(Variants, ParsesTheLadder) {
  auto v = VariantSpec::parse("RN2+A+E");
  EXPECT_EQ(v.name, "RN2+A+E");
  EXPECT_EQ(v.base, "RN2");
  EXPECT_TRUE(v.augment);
  EXPECT_TRUE(v.ensemble);
  v = VariantSpec::parse("LR120");
  EXPECT_EQ(v.base, "LR120");
  EXPECT_FALSE(v.augment || v.ensemble);
  v = VariantSpec::parse("RN1+E");
  EXPECT_FALSE(v.augment);
  EXPECT_TRUE(v.ensemble);
}

TEST(Variants, RejectsUnknownNames) {
  for (const char* bad : {"", "RN3", "RN2+E+A", "RN2+A+A", "rn2", "RN2+", "RN2+X", "LR120 "}) {
    EXPECT_EQ(codeOf([&] { VariantSpec::parse(bad); }), ErrorCode::InvalidArgument) << bad;
  }
}

// ---- experiment ----

class ExperimentTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir("exp");
    saveGraph(buildReferenceNetwork(), dir_->path() / "model" / "reference.tgraph");
    frames_ = new std::vector<SyntheticFrame>(synthesizeCorpus(smallCorpus()));
  }
  static void TearDownTestSuite() {
    delete dir_;
    delete frames_;
  }
  static std::string modelPath() { return (dir_->path() / "model" / "reference.tgraph").string(); }

  static TempDir* dir_;
  static std::vector<SyntheticFrame>* frames_;
};
TempDir* ExperimentTest::dir_ = nullptr;
std::vector<SyntheticFrame>* ExperimentTest::frames_ = nullptr;

TEST_F(ExperimentTest, VariantsShareTheSplit) {
  auto engine = Engine::create(withWorkers(2));
  ExperimentOptions opts;
  opts.epochs = 30;
  opts.variants = {"LR120", "RN1", "RN2", "RN2+A", "RN2+A+E"};
  auto results = runExperiment(corpusDataset(engine, *frames_, 4), modelPath(), opts);
  ASSERT_EQ(results.size(), 5u);
  const auto& base = results[2];
  EXPECT_EQ(base.trainRows + base.testRows, static_cast<int64_t>(frames_->size()));
  for (const auto& r : results) {
    SCOPED_TRACE(r.spec.name);
    const auto& c = r.confusion;
    EXPECT_EQ(c.tp + c.fp + c.fn + c.tn, r.testRows);
    EXPECT_EQ(c.tp + c.fn, base.confusion.tp + base.confusion.fn);
    EXPECT_EQ(r.testRows, base.testRows);
    EXPECT_EQ(r.trainRows, r.spec.augment ? 2 * base.trainRows : base.trainRows);
    EXPECT_GE(r.roc.auc, 0.0);
    EXPECT_LE(r.roc.auc, 1.0);
    EXPECT_EQ(static_cast<int64_t>(r.scored.size()), r.testRows);
  }
  // Ensembled scores are constant within a burst, and so are the labels.
  std::map<std::string, std::set<double>> burstScores, burstLabels;
  for (const auto& s : results[4].scored) {
    ASSERT_FALSE(s.burstId.empty());
    burstScores[s.burstId].insert(s.score);
    burstLabels[s.burstId].insert(s.label);
  }
  EXPECT_GT(burstScores.size(), 1u);
  for (const auto& [b, v] : burstScores) EXPECT_EQ(v.size(), 1u) << b;
  for (const auto& [b, v] : burstLabels) EXPECT_EQ(v.size(), 1u) << b;
  // Every variant scores the same test images.
  std::multiset<std::string> paths;
  for (const auto& s : base.scored) paths.insert(s.path);
  for (const auto& r : results) {
    std::multiset<std::string> p;
    for (const auto& s : r.scored) p.insert(s.path);
    EXPECT_EQ(p, paths) << r.spec.name;
  }
}

TEST_F(ExperimentTest, RejectsMissingLabelsAndDuplicates) {
  auto engine = Engine::create(withWorkers(1));
  Dataset ds = corpusDataset(engine, *frames_, 2);
  const int label = ds.schema().indexOf("label");
  Dataset unlabeled = ds.map(
      [label](const Row& r) {
        Row out = r;
        if (asString(r.values[0]).find("cam001") != std::string::npos) out.values[label] = Null{};
        return out;
      },
      ds.schema());
  ExperimentOptions opts;
  opts.variants = {"RN2"};
  try {
    runExperiment(unlabeled, modelPath(), opts);
    FAIL() << "expected InvalidArgument";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    EXPECT_NE(std::string(e.what()).find("no label"), std::string::npos) << e.what();
  }
  opts.variants = {"RN2", "RN2"};
  EXPECT_EQ(codeOf([&] { runExperiment(ds, modelPath(), opts); }), ErrorCode::InvalidArgument);
  opts.variants = {"RN2", "VGG"};
  EXPECT_EQ(codeOf([&] { runExperiment(ds, modelPath(), opts); }), ErrorCode::InvalidArgument);
}

TEST_F(ExperimentTest, OutputsAreByteIdenticalAcrossWorkerCounts) {
  generateCorpus(smallCorpus(), dir_->path() / "corpus");
  ExperimentOptions opts;
  opts.epochs = 30;
  opts.variants = {"LR120", "RN2", "RN2+A+E"};
  std::vector<std::map<std::string, std::string>> runs;
  for (int w : {1, 2, 8}) {
    const fs::path out = dir_->path() / ("out" + std::to_string(w));
    runExperiment(Engine::create(withWorkers(w)), dir_->path() / "corpus", out, opts);
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(out)) {
      if (e.is_regular_file()) files[fs::relative(e.path(), out).string()] = slurp(e.path());
    }
    runs.push_back(std::move(files));
  }
  const std::set<std::string> expected = {
      "LR120.metrics.json", "LR120.roc.csv", "RN2.metrics.json", "RN2.roc.csv",
      "RN2+A+E.metrics.json", "RN2+A+E.roc.csv", "summary.csv", "model/reference.tgraph",
      "model/reference.bin"};
  std::set<std::string> names;
  for (const auto& [k, v] : runs[0]) names.insert(k);
  EXPECT_EQ(names, expected);
  EXPECT_EQ(runs[0], runs[1]);
  EXPECT_EQ(runs[0], runs[2]);
  const std::string summary = runs[0]["summary.csv"];
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "variant,auc,tp,fp,fn,tn,train_rows,test_rows");
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 4);
  auto doc = json::parse(runs[0]["RN2.metrics.json"]);
  EXPECT_TRUE(doc.contains("auc"));
  EXPECT_TRUE(doc.contains("confusion"));
}

// ---- row json ----

TEST(RowJson, EncodesEveryCellType) {
  EXPECT_TRUE(cellToJson(Null{}).is_null());
  EXPECT_EQ(cellToJson(int64_t{-3}), -3);
  EXPECT_EQ(cellToJson(2.5), 2.5);
  EXPECT_EQ(cellToJson(std::nan("")), "nan");
  EXPECT_EQ(cellToJson(-HUGE_VAL), "-inf");
  EXPECT_EQ(cellToJson(true), true);
  EXPECT_EQ(cellToJson(std::string("a,b")), "a,b");
  EXPECT_EQ(cellToJson(Bytes{{'h', 'i'}}), "aGk=");
  EXPECT_EQ(cellToJson(FloatVector{1.5f, -2.0f}).dump(), "[1.5,-2.0]");
  EXPECT_EQ(cellToJson(Timestamp{1500000000}), 1500000000);
  ImageRecord img;
  img.path = "x.pgm";
  img.width = 2;
  img.height = 1;
  img.data = {0, 255};
  auto j = cellToJson(img);
  EXPECT_EQ(j["width"], 2);
  EXPECT_EQ(j["height"], 1);
  EXPECT_EQ(j["mode"], "GRAY8");
  EXPECT_EQ(base64Decode(j["data"].get<std::string>()), img.data);
  auto nested = std::make_shared<std::vector<Row>>(std::vector<Row>{Row{{int64_t{1}}}, Row{{int64_t{2}}}});
  EXPECT_EQ(cellToJson(RowListValue{nested}).dump(), "[[1],[2]]");
}

// ---- builtin registry ----

TEST(BuiltinRegistry, ListsEveryShippedStage) {
  const auto& reg = builtinRegistry();
  const std::vector<std::string> expected = {
      "BurstAssigner", "CacheStage", "DropColumns", "GroupedScoreAverager", "ImageFeaturizer",
      "ImageSetAugmenter", "ImageTransformer", "LogisticRegression", "LogisticRegressionModel",
      "NetworkModel", "RepartitionStage", "SelectColumns", "VectorAssembler"};
  EXPECT_EQ(reg.names(), expected);
  auto doc = json::parse(reg.document());
  EXPECT_EQ(doc["version"], 1);
  ASSERT_EQ(doc["stages"].size(), expected.size());
  for (const auto& s : doc["stages"]) {
    EXPECT_EQ(s, descriptorToJson(reg.describe(s["name"].get<std::string>())));
  }
  EXPECT_EQ(reg.document(), builtinRegistry().document());
}

// ---- bench workload ----

TEST(BenchWorkload, FeaturizesEveryImageInOrder) {
  TempDir dir("bench");
  const std::string model = (dir / "tiny.tgraph").string();
  saveGraph(buildReferenceNetwork(), model);
  auto pgm = std::make_shared<const std::vector<std::vector<uint8_t>>>(scalingImages(23, 5));
  EXPECT_EQ(*pgm, scalingImages(23, 5));
  EXPECT_EQ(decodeImage((*pgm)[0]).width, kRefSide);
  auto engine = Engine::create(withWorkers(2));
  auto factory = featurizerWorkload(pgm, model, 4);
  Dataset ds = decodedImages(engine, pgm, 4);
  auto result = engine->runJob(factory(engine));
  int64_t rows = 0;
  for (const auto& p : result.partitions) {
    for (const auto& r : p.rows) {
      EXPECT_EQ(asInt(r.values[0]) % 4, p.index);
      EXPECT_EQ(std::get<FloatVector>(r.values.back()).size(), 64u);
      ++rows;
    }
  }
  EXPECT_EQ(rows, 23);
  EXPECT_EQ(ds.count(), 23);
  EXPECT_EQ(codeOf([] { scalingImages(-1, 0); }), ErrorCode::InvalidArgument);
}

// ---- rpc ----

class RpcTest : public ::testing::Test {
 protected:
  RpcTest() : engine_(Engine::create(withWorkers(2))), server_(engine_) {}

  json call(const std::string& method, json params = json::object()) {
    json req = {{"id", ++id_}, {"method", method}, {"params", std::move(params)}};
    json resp = json::parse(server_.handle(req.dump()));
    EXPECT_EQ(resp["id"], id_);
    return resp;
  }
  json ok(const std::string& method, json params = json::object()) {
    json resp = call(method, std::move(params));
    EXPECT_TRUE(resp["ok"].get<bool>()) << resp.dump();
    return resp["result"];
  }
  std::string errorCode(const std::string& method, json params = json::object()) {
    json resp = call(method, std::move(params));
    EXPECT_FALSE(resp["ok"].get<bool>()) << resp.dump();
    return resp.value("error", json::object()).value("code", "");
  }

  // Separable two-feature table: label = x0 > 0.
  fs::path writeTable() {
    std::vector<Row> rows;
    for (int i = 0; i < 40; ++i) {
      const float x = static_cast<float>(i - 20) + 0.5f;
      rows.push_back(Row{{FloatVector{x, 1.0f}, static_cast<double>(x > 0)}});
    }
    const fs::path p = dir_ / "table.txt";
    std::ofstream(p) << toTextTable(Schema{{"features", DType::FloatVector}, {"label", DType::Float64}},
                                    rows);
    return p;
  }

  TempDir dir_{"rpc"};
  std::shared_ptr<Engine> engine_;
  RpcServer server_;
  int id_ = 0;
};

TEST_F(RpcTest, DescribeStagesMatchesTheRegistryDocument) {
  EXPECT_EQ(ok("describeStages"), json::parse(builtinRegistry().document()));
}

TEST_F(RpcTest, CreateSetAndGetParams) {
  auto created = ok("createStage", {{"stageName", "LogisticRegression"}, {"params", {{"epochs", 5}}}});
  const std::string h = created["handle"];
  EXPECT_EQ(created["kind"], "estimator");
  EXPECT_EQ(created["params"]["epochs"], 5);
  auto updated = ok("setParams", {{"handle", h}, {"params", {{"l2", 0.5}}}});
  EXPECT_NE(updated["handle"], h);
  EXPECT_EQ(updated["params"]["epochs"], 5);
  EXPECT_EQ(updated["params"]["l2"], 0.5);
  auto old = ok("getParams", {{"handle", h}});
  EXPECT_EQ(old["params"], json({{"epochs", 5}}));
  EXPECT_EQ(errorCode("setParams", {{"handle", h}, {"params", {{"epochs", "many"}}}}),
            "InvalidParam");
  EXPECT_EQ(errorCode("setParams", {{"handle", h}, {"params", {{"nope", 1}}}}), "InvalidParam");
  EXPECT_EQ(errorCode("createStage", {{"stageName", "Nope"}}), "UnknownStageName");
}

TEST_F(RpcTest, FitTransformCollectAndSave) {
  auto read = ok("readTable", {{"path", writeTable().string()}, {"partitions", 3}});
  const std::string data = read["data"];
  EXPECT_EQ(read["schema"][0], json({{"name", "features"}, {"dtype", "FloatVector"}}));
  EXPECT_EQ(ok("count", {{"data", data}})["count"], 40);
  const std::string est = ok("createStage", {{"stageName", "LogisticRegression"},
                                             {"params", {{"epochs", 50}, {"learningRate", 0.05}}}})["handle"];
  auto fitted = ok("fit", {{"handle", est}, {"data", data}});
  EXPECT_EQ(fitted["stageName"], "LogisticRegressionModel");
  const std::string model = fitted["handle"];
  auto out = ok("transform", {{"handle", model}, {"data", data}});
  EXPECT_EQ(out["schema"].size(), 3u);
  auto rows = ok("collect", {{"data", out["data"]}, {"limit", 5}});
  ASSERT_EQ(rows["rows"].size(), 5u);
  EXPECT_EQ(ok("collect", {{"data", out["data"]}})["rows"].size(), 40u);
  for (const auto& r : ok("collect", {{"data", out["data"]}})["rows"]) {
    EXPECT_EQ(r[2].get<double>() >= 0.5, r[1].get<double>() == 1.0) << r.dump();
  }

  // Fitted stages save as a model directory; anything unfitted as a spec.
  const fs::path modelDir = dir_ / "model";
  EXPECT_EQ(ok("savePipeline", {{"handles", {model}}, {"path", modelDir.string()}})["fitted"], true);
  auto loaded = loadPipelineModel(modelDir, builtinRegistry());
  ASSERT_EQ(loaded.size(), 1u);
  std::ifstream tf(dir_ / "table.txt");
  TextTable table = readTextTable(tf);
  auto reloaded = loaded.transform(Dataset::fromRows(engine_, table.rows, table.schema, 3)).collect();
  auto served = ok("collect", {{"data", out["data"]}})["rows"];
  ASSERT_EQ(reloaded.size(), served.size());
  for (size_t i = 0; i < reloaded.size(); ++i) {
    EXPECT_EQ(asDouble(reloaded[i].values[2]), served[i][2].get<double>());
  }
  const fs::path spec = dir_ / "spec.json";
  EXPECT_EQ(ok("savePipeline", {{"handles", {est}}, {"path", spec.string()}})["fitted"], false);
  auto pipeline = loadPipelineSpec(spec, builtinRegistry());
  ASSERT_EQ(pipeline.stages().size(), 1u);
  EXPECT_EQ(pipeline.stages()[0]->getInt("epochs"), 50);

  EXPECT_EQ(errorCode("transform", {{"handle", est}, {"data", data}}), "InvalidArgument");
  EXPECT_EQ(errorCode("fit", {{"handle", model}, {"data", data}}), "InvalidArgument");
  EXPECT_EQ(errorCode("savePipeline", {{"handles", json::array()}, {"path", spec.string()}}),
            "EmptyPipeline");
}

TEST_F(RpcTest, ReadImagesFromACorpusDirectory) {
  CorpusOptions o;
  o.cameras = 2;
  generateCorpus(o, dir_ / "corpus");
  auto read = ok("readImages", {{"dir", (dir_ / "corpus").string()}});
  auto rows = ok("collect", {{"data", read["data"]}, {"limit", 2}});
  ASSERT_EQ(rows["rows"].size(), 2u);
  EXPECT_EQ(rows["schema"][1]["dtype"], "Image");
  EXPECT_EQ(rows["rows"][0][1]["width"], 64);
  EXPECT_EQ(errorCode("readImages", {{"dir", (dir_ / "missing").string()}}), "Io");
}

TEST_F(RpcTest, MalformedRequestsAreBadRequests) {
  auto resp = json::parse(server_.handle("{not json"));
  EXPECT_FALSE(resp["ok"].get<bool>());
  EXPECT_TRUE(resp["id"].is_null());
  EXPECT_EQ(resp["error"]["code"], "BadRequest");
  resp = json::parse(server_.handle(R"({"method":"describeStages"})"));
  EXPECT_EQ(resp["error"]["code"], "BadRequest");
  resp = json::parse(server_.handle(R"({"id":4,"method":"describeStages","params":[1]})"));
  EXPECT_EQ(resp["id"], 4);
  EXPECT_EQ(resp["error"]["code"], "BadRequest");
  EXPECT_EQ(errorCode("frobnicate"), "BadRequest");
  EXPECT_EQ(errorCode("getParams", {{"handle", "stage-999"}}), "BadRequest");
  EXPECT_EQ(errorCode("getParams"), "BadRequest");
  EXPECT_EQ(errorCode("collect", {{"data", "data-1"}}), "BadRequest");
  EXPECT_EQ(errorCode("collect", {{"data", 7}}), "BadRequest");
}

TEST(RpcServe, AnswersInOrderUntilShutdown) {
  RpcServer server(Engine::create(withWorkers(1)));
  std::istringstream in(
      "{\"id\":1,\"method\":\"createStage\",\"params\":{\"stageName\":\"CacheStage\"}}\n"
      "\n"
      "{\"id\":2,\"method\":\"getParams\",\"params\":{\"handle\":\"stage-1\"}}\n"
      "oops\n"
      "{\"id\":3,\"method\":\"shutdown\"}\n"
      "{\"id\":4,\"method\":\"describeStages\"}\n");
  std::ostringstream out;
  EXPECT_EQ(server.serve(in, out), 4);
  EXPECT_TRUE(server.shutdownRequested());
  std::istringstream lines(out.str());
  std::vector<json> resp;
  for (std::string l; std::getline(lines, l);) resp.push_back(json::parse(l));
  ASSERT_EQ(resp.size(), 4u);
  EXPECT_EQ(resp[0]["id"], 1);
  EXPECT_EQ(resp[1]["result"]["stageName"], "CacheStage");
  EXPECT_FALSE(resp[2]["ok"].get<bool>());
  EXPECT_EQ(resp[3]["id"], 3);
  EXPECT_TRUE(resp[3]["ok"].get<bool>());
}

}  // namespace
}  // namespace tundra
