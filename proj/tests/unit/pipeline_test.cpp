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

#include <atomic>
#include <filesystem>

#include "support/test_util.hpp"
#include "tundra/common/bytes.hpp"
#include "tundra/dataframe/encoding.hpp"
#include "tundra/pipeline/serialize.hpp"
#include "tundra/pipeline/utility_stages.hpp"

namespace tundra {
namespace {

namespace fs = std::filesystem;
using testing::codeOf;
using testing::TempDir;

// Subtracts a learned column mean.
class CenterModel : public StageImpl<CenterModel, Transformer> {
 public:
  CenterModel(ParamMap params, double mean)
      : StageImpl(describe(), std::move(params)), mean_(mean) {}
  static const StageDescriptor& describe() {
    static const StageDescriptor d{"CenterModel",
                                   StageKind::Transformer,
                                   "Fitted centering.",
                                   {{"col", ParamKind::Column, std::string("x"), "Column."}}};
    return d;
  }
  Schema transformSchema(const Schema& in) const override {
    requireColumn(in, getString("col"), DType::Float64);
    return in;
  }
  Dataset transform(const Dataset& ds) const override {
    auto out = transformSchema(ds.schema());
    size_t idx = out.indexOf(getString("col"));
    double m = mean_;
    return ds.map(
        [idx, m](const Row& r) {
          Row o = r;
          o.values[idx] = asDouble(r[idx]) - m;
          return o;
        },
        out);
  }
  std::vector<uint8_t> stateBytes() const override {
    ByteBuffer b;
    putF64(b, mean_);
    return b;
  }
  double mean() const { return mean_; }

 private:
  double mean_;
};

class Center : public StageImpl<Center, Estimator> {
 public:
  explicit Center(ParamMap params) : StageImpl(describe(), std::move(params)) {}
  static const StageDescriptor& describe() {
    static const StageDescriptor d{"Center",
                                   StageKind::Estimator,
                                   "Learns a column mean.",
                                   {{"col", ParamKind::Column, std::string("x"), "Column."},
                                    {"seed", ParamKind::Int, int64_t{42}, "Unused seed."}}};
    return d;
  }
  std::shared_ptr<Transformer> fit(const Dataset& ds) const override {
    requireColumn(ds.schema(), getString("col"), DType::Float64);
    size_t idx = ds.schema().indexOf(getString("col"));
    double sum = 0;
    int64_t n = 0;
    for (const auto& r : ds.collect()) {
      sum += asDouble(r[idx]);
      ++n;
    }
    if (n == 0) throw Error(ErrorCode::FitError, "empty input");
    return std::make_shared<CenterModel>(ParamMap{{"col", getString("col")}}, sum / n);
  }
};

StageRegistry testRegistry() {
  StageRegistry r;
  registerUtilityStages(r);
  r.add(Center::describe(), statelessFactory<Center>());
  r.add(CenterModel::describe(), [](const ParamMap& p, std::span<const uint8_t> state) -> StagePtr {
    if (state.size() != 8) throw Error(ErrorCode::CorruptStageFile, "bad state");
    return std::make_shared<CenterModel>(p, getF64(state, 0));
  });
  return r;
}

std::shared_ptr<Engine> engine() {
  EngineConfig cfg;
  cfg.workers = 2;
  return Engine::create(cfg);
}

Dataset abData() {
  Schema s{{"a", DType::Int64}, {"b", DType::String}, {"x", DType::Float64}};
  std::vector<Row> rows;
  for (int i = 0; i < 12; ++i) {
    rows.push_back(Row({int64_t{i}, "r" + std::to_string(i), 0.5 * i}));
  }
  return Dataset::fromRows(engine(), rows, s, 3);
}


TEST(Params, DescriptorValidation) {
  StageDescriptor dup{"X", StageKind::Transformer, "", {{"p", ParamKind::Int, {}, ""},
                                                       {"p", ParamKind::Int, {}, ""}}};
  EXPECT_EQ(codeOf([&] { dup.validate(); }), ErrorCode::InvalidParam);
  StageDescriptor badDefault{"X", StageKind::Transformer, "",
                             {{"p", ParamKind::Int, ParamValue{std::string("no")}, ""}}};
  EXPECT_EQ(codeOf([&] { badDefault.validate(); }), ErrorCode::InvalidParam);
}

TEST(Params, CheckingAndCoercion) {
  StageDescriptor d{"X", StageKind::Transformer, "",
                    {{"f", ParamKind::Float, 1.0, ""}, {"s", ParamKind::Column, {}, ""}}};
  auto p = checkParams(d, {{"f", int64_t{3}}});
  EXPECT_EQ(std::get<double>(p["f"]), 3.0);
  EXPECT_EQ(codeOf([&] { checkParams(d, {{"s", int64_t{3}}}); }), ErrorCode::InvalidParam);
  EXPECT_EQ(codeOf([&] { checkParams(d, {{"zz", int64_t{3}}}); }), ErrorCode::InvalidParam);
}

// Property: set(get(x)) = x and JSON round trip for every param kind.
TEST(Params, RoundTripEveryKind) {
  std::vector<std::pair<ParamKind, ParamValue>> cases{
      {ParamKind::Int, int64_t{-7}},
      {ParamKind::Int, int64_t{1} << 62},
      {ParamKind::Float, 0.1},
      {ParamKind::Float, -1e-300},
      {ParamKind::Bool, true},
      {ParamKind::String, std::string("héllo \"x\"")},
      {ParamKind::StringList, StringList{"a", "", "c"}},
      {ParamKind::StringList, StringList{}},
      {ParamKind::FloatList, FloatList{1.5, -2.25, 1.0 / 3}},
      {ParamKind::FloatList, FloatList{}},
      {ParamKind::Path, std::string("/tmp/x y")},
      {ParamKind::Column, std::string("features")},
  };
  for (const auto& [kind, value] : cases) {
    StageDescriptor d{"X", StageKind::Transformer, "", {{"p", kind, {}, ""}}};
    auto checked = checkParams(d, {{"p", value}});
    EXPECT_EQ(checked.at("p"), value);
    auto text = paramToJson(value).dump();
    EXPECT_EQ(paramFromJson(nlohmann::json::parse(text), kind), value) << text;
  }
  EXPECT_EQ(codeOf([] { paramFromJson(nlohmann::json(1.5), ParamKind::Int); }),
            ErrorCode::InvalidParam);
  EXPECT_EQ(codeOf([] { paramFromJson(nlohmann::json("x"), ParamKind::Bool); }),
            ErrorCode::InvalidParam);
}

TEST(Stage, DefaultsAndWithParams) {
  Center c({});
  EXPECT_EQ(c.getString("col"), "x");
  EXPECT_TRUE(c.params().empty());
  auto c2 = c.withParams({{"col", std::string("y")}});
  EXPECT_EQ(c.getString("col"), "x");
  EXPECT_EQ(c2->getString("col"), "y");
  EXPECT_EQ(c2->effectiveParams().at("seed"), ParamValue{int64_t{42}});
  SelectColumns unset({});
  EXPECT_EQ(codeOf([&] { unset.getStringList("cols"); }), ErrorCode::InvalidParam);
}

TEST(UtilityStages, SelectDropRepartitionCache) {
  auto ds = abData();
  SelectColumns sel({{"cols", StringList{"a"}}});
  auto out = sel.transform(ds);
  EXPECT_EQ(out.schema(), Schema({{"a", DType::Int64}}));
  EXPECT_EQ(asInt(out.collect()[1][0]), 3);
  DropColumns drop({{"cols", StringList{"b", "x"}}});
  EXPECT_EQ(drop.transform(ds).schema(), Schema({{"a", DType::Int64}}));
  EXPECT_EQ(codeOf([&] { SelectColumns({{"cols", StringList{"zz"}}}).transform(ds); }),
            ErrorCode::UnknownColumn);
  EXPECT_EQ(codeOf([&] { DropColumns({{"cols", StringList{"zz"}}}).transformSchema(ds.schema()); }),
            ErrorCode::UnknownColumn);

  auto rep = RepartitionStage({{"numPartitions", int64_t{4}}}).transform(ds);
  EXPECT_EQ(rep.collectPartitions().size(), 4u);
  EXPECT_EQ(codeOf([] { RepartitionStage({{"numPartitions", int64_t{0}}}); }),
            ErrorCode::InvalidPartitionCount);

  auto calls = std::make_shared<std::atomic<int>>(0);
  auto counted = ds.map(
      [calls](const Row& r) {
        ++*calls;
        return r;
      },
      ds.schema());
  auto cached = CacheStage().transform(counted);
  cached.collect();
  cached.collect();
  EXPECT_EQ(*calls, 12);
}

TEST(Stage, TransformIsReferentiallyTransparent) {
  auto ds = abData();
  DropColumns drop({{"cols", StringList{"b"}}});
  EXPECT_EQ(canonicalSort(drop.transform(ds).collect()),
            canonicalSort(drop.transform(ds).collect()));
}

TEST(Pipeline, EmptyRejected) {
  EXPECT_EQ(codeOf([] { Pipeline({}); }), ErrorCode::EmptyPipeline);
}

TEST(Pipeline, TransformersPassThrough) {
  auto a = std::make_shared<SelectColumns>(ParamMap{{"cols", StringList{"a", "x"}}});
  auto b = std::make_shared<CacheStage>();
  auto model = Pipeline({a, b}).fit(abData());
  ASSERT_EQ(model.size(), 2u);
  EXPECT_EQ(model.stages()[0], a);
  EXPECT_EQ(model.stages()[1], b);
}

// Property: pipeline fit + transform equals a manual fit/transform fold.
TEST(Pipeline, FitEqualsManualFold) {
  auto ds = abData();
  auto drop = std::make_shared<DropColumns>(ParamMap{{"cols", StringList{"b"}}});
  auto center = std::make_shared<Center>(ParamMap{});
  auto model = Pipeline({drop, center}).fit(ds);
  auto viaPipeline = canonicalSort(model.transform(ds).collect());

  auto step1 = drop->transform(ds);
  auto fitted = center->fit(step1);
  auto manual = canonicalSort(fitted->transform(step1).collect());
  EXPECT_EQ(viaPipeline, manual);
  EXPECT_EQ(model.stages()[1]->stageName(), "CenterModel");
  EXPECT_EQ(std::dynamic_pointer_cast<CenterModel>(model.stages()[1])->mean(), 2.75);
  EXPECT_EQ(model.transformSchema(ds.schema()), model.transform(ds).schema());
}

TEST(Pipeline, FailingStageIsNamed) {
  auto ds = abData();
  auto drop = std::make_shared<DropColumns>(ParamMap{{"cols", StringList{"x"}}});
  auto center = std::make_shared<Center>(ParamMap{});
  try {
    Pipeline({drop, center}).fit(ds);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stageIndex(), 1u);
    EXPECT_EQ(e.code(), ErrorCode::MissingColumn);
  }
}

TEST(Pipeline, FitTwiceGivesIdenticalBytes) {
  auto ds = abData();
  Center c({});
  EXPECT_EQ(serializeStage(*c.fit(ds)), serializeStage(*c.fit(ds)));
}


TEST(Serialization, StageRoundTrip) {
  auto reg = testRegistry();
  TempDir tmp;
  SelectColumns sel({{"cols", StringList{"b", "a"}}});
  saveStage(sel, tmp.path() / "sel.tstage");
  auto back = loadStage(tmp.path() / "sel.tstage", reg);
  EXPECT_EQ(back->descriptor(), sel.descriptor());
  EXPECT_EQ(back->params(), sel.params());

  auto fitted = Center({}).fit(abData());
  auto bytes = serializeStage(*fitted);
  auto restored = deserializeStage(bytes, reg);
  EXPECT_EQ(restored->stateBytes(), fitted->stateBytes());
  EXPECT_EQ(serializeStage(*restored), bytes);
}

TEST(Serialization, CorruptFiles) {
  auto reg = testRegistry();
  auto bytes = serializeStage(*Center({}).fit(abData()));
  auto truncated = std::vector<uint8_t>(bytes.begin(), bytes.end() - 3);
  EXPECT_EQ(codeOf([&] { deserializeStage(truncated, reg); }), ErrorCode::CorruptStageFile);
  auto headOnly = std::vector<uint8_t>(bytes.begin(), bytes.begin() + 20);
  EXPECT_EQ(codeOf([&] { deserializeStage(headOnly, reg); }), ErrorCode::CorruptStageFile);
  auto flipped = bytes;
  flipped.back() ^= 0x1;
  EXPECT_EQ(codeOf([&] { deserializeStage(flipped, reg); }), ErrorCode::CorruptStageFile);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(codeOf([&] { deserializeStage(magic, reg); }), ErrorCode::CorruptStageFile);
  EXPECT_EQ(codeOf([&] { deserializeStage({}, reg); }), ErrorCode::CorruptStageFile);

  std::string unknown = "TSTAGE1\n{\"stageName\":\"Nope\",\"params\":{},\"stateBytes\":0,"
                        "\"stateSha256\":\"e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855\"}\n";
  EXPECT_EQ(codeOf([&] {
              deserializeStage(std::vector<uint8_t>(unknown.begin(), unknown.end()), reg);
            }),
            ErrorCode::UnknownStageName);
}

TEST(Serialization, PipelineSpecAndModelDirectory) {
  auto reg = testRegistry();
  auto p = parsePipelineSpec(R"([{"stageName":"DropColumns","params":{"cols":["b"]}},
                                 {"stageName":"Center"}])",
                             reg);
  ASSERT_EQ(p.stages().size(), 2u);
  EXPECT_EQ(pipelineSpecJson(parsePipelineSpec(pipelineSpecJson(p.stages()), reg).stages()),
            pipelineSpecJson(p.stages()));
  EXPECT_EQ(codeOf([&] { parsePipelineSpec("[]", reg); }), ErrorCode::EmptyPipeline);
  EXPECT_EQ(codeOf([&] { parsePipelineSpec(R"([{"stageName":"Zip"}])", reg); }),
            ErrorCode::UnknownStageName);
  EXPECT_EQ(codeOf([&] { parsePipelineSpec("{", reg); }), ErrorCode::ParseError);
  EXPECT_EQ(codeOf([&] {
              parsePipelineSpec(R"([{"stageName":"Center","params":{"seed":"x"}}])", reg);
            }),
            ErrorCode::InvalidParam);

  TempDir tmp;
  auto ds = abData();
  auto model = p.fit(ds);
  savePipelineModel(model, tmp.path() / "model");
  auto back = loadPipelineModel(tmp.path() / "model", reg);
  EXPECT_EQ(back.transform(ds).collect(), model.transform(ds).collect());
}

TEST(Registry, DocumentIsStableAndComplete) {
  auto reg = testRegistry();
  auto doc = reg.document();
  EXPECT_EQ(doc, reg.document());
  auto j = nlohmann::json::parse(doc);
  EXPECT_EQ(j["version"], 1);
  ASSERT_EQ(j["stages"].size(), reg.names().size());
  std::set<std::string> names;
  for (const auto& s : j["stages"]) {
    EXPECT_TRUE(names.insert(s["name"].get<std::string>()).second);
    const auto& desc = reg.describe(s["name"].get<std::string>());
    ASSERT_EQ(s["params"].size(), desc.params.size());
    for (const auto& p : s["params"]) {
      auto kind = parseParamKind(p["kind"].get<std::string>());
      ASSERT_TRUE(kind);
      if (!p["default"].is_null()) {
        EXPECT_TRUE(valueMatchesKind(paramFromJson(p["default"], *kind), *kind));
      }
      EXPECT_TRUE(p.contains("doc"));
    }
  }
  auto sorted = reg.names();
  EXPECT_TRUE(std::is_sorted(sorted.begin(), sorted.end()));
  EXPECT_THROW(reg.add(Center::describe(), statelessFactory<Center>()), Error);
  EXPECT_EQ(codeOf([&] { reg.create("Zip"); }), ErrorCode::UnknownStageName);
}

}  // namespace
}  // namespace tundra
