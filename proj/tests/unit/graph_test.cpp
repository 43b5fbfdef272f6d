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

#include <cmath>
#include <filesystem>
#include <random>

#include "support/test_util.hpp"
#include "tundra/common/bytes.hpp"
#include "tundra/common/sha256.hpp"
#include "tundra/graph/model_io.hpp"
#include "tundra/graph/reference_net.hpp"

namespace tundra {
namespace {

namespace fs = std::filesystem;
using testing::codeOf;
using testing::TempDir;


GraphNode node(std::string name, OpKind op, std::vector<std::string> in = {}) {
  GraphNode n;
  n.name = std::move(name);
  n.op = op;
  n.inputs = std::move(in);
  return n;
}

std::vector<float> randomValues(std::mt19937_64& rng, size_t n, float lo = -1, float hi = 1) {
  std::uniform_real_distribution<float> d(lo, hi);
  std::vector<float> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Single-layer graphs over a fresh weight store.
struct OneLayer {
  std::shared_ptr<WeightStore> store = std::make_shared<WeightStore>();
  std::vector<GraphNode> nodes{node("x", OpKind::Input)};

  ComputationGraph finish(Shape in, const std::string& out) {
    return ComputationGraph(nodes, "x", std::move(in), out, store);
  }
};

ComputationGraph denseGraph(int in, int out, std::vector<float> w, std::vector<float> b) {
  OneLayer g;
  g.store->add({"w", {in, out}, std::move(w)});
  g.store->add({"b", {out}, std::move(b)});
  auto d = node("d", OpKind::Dense, {"x"});
  d.outUnits = out;
  d.weights = {"w", "b"};
  g.nodes.push_back(d);
  return g.finish({in}, "d");
}

ComputationGraph convGraph(Shape in, int kh, int kw, int oc, int stride, std::vector<float> w,
                           std::vector<float> b) {
  OneLayer g;
  g.store->add({"w", {kh, kw, in[2], oc}, std::move(w)});
  g.store->add({"b", {oc}, std::move(b)});
  auto c = node("c", OpKind::Conv2d, {"x"});
  c.kernelH = kh;
  c.kernelW = kw;
  c.outChannels = oc;
  c.stride = stride;
  c.weights = {"w", "b"};
  g.nodes.push_back(c);
  return g.finish(std::move(in), "c");
}

ComputationGraph poolGraph(Shape in, int ph, int pw, int stride) {
  OneLayer g;
  auto p = node("p", OpKind::MaxPool2d, {"x"});
  p.poolH = ph;
  p.poolW = pw;
  p.stride = stride;
  g.nodes.push_back(p);
  return g.finish(std::move(in), "p");
}

TEST(Ops, DenseIdentity) {
  auto g = denseGraph(2, 2, {1, 0, 0, 1}, {0, 0});
  EXPECT_EQ(g.eval(Tensor({2}, {1, 2})).data, (std::vector<float>{1, 2}));
}

TEST(Ops, Relu) {
  OneLayer g;
  g.nodes.push_back(node("r", OpKind::Relu, {"x"}));
  EXPECT_EQ(g.finish({2}, "r").eval(Tensor({2}, {-1, 2})).data, (std::vector<float>{0, 2}));
}

TEST(Ops, ConvAllOnes) {
  auto g = convGraph({3, 3, 1}, 3, 3, 1, 1, std::vector<float>(9, 1.0f), {0});
  auto out = g.eval(Tensor({3, 3, 1}, std::vector<float>(9, 1.0f)));
  EXPECT_EQ(out.shape, (Shape{1, 1, 1}));
  EXPECT_EQ(out.data[0], 9.0f);
}

TEST(Ops, SoftmaxSymmetric) {
  OneLayer g;
  g.nodes.push_back(node("s", OpKind::Softmax, {"x"}));
  EXPECT_EQ(g.finish({2}, "s").eval(Tensor({2}, {0, 0})).data, (std::vector<float>{0.5f, 0.5f}));
}

TEST(Ops, AddAndFlatten) {
  OneLayer g;
  g.nodes.push_back(node("f", OpKind::Flatten, {"x"}));
  g.nodes.push_back(node("a", OpKind::Add, {"f", "f"}));
  auto graph = g.finish({2, 1, 2}, "a");
  auto out = graph.eval(Tensor({2, 1, 2}, {1, 2, 3, 4}));
  EXPECT_EQ(out.shape, (Shape{4}));
  EXPECT_EQ(out.data, (std::vector<float>{2, 4, 6, 8}));
}

// Naive nested-loop oracles. The exact variants accumulate in the runtime's
// documented order; the reordered variants do not.
std::vector<float> naiveDense(const std::vector<float>& x, const std::vector<float>& w,
                              const std::vector<float>& b, int in, int out, bool reorder) {
  std::vector<float> y(static_cast<size_t>(out));
  for (int o = 0; o < out; ++o) {
    float acc = 0;
    if (!reorder) {
      for (int i = 0; i < in; ++i) acc += x[i] * w[i * out + o];
    } else {
      for (int i = in - 1; i >= 0; --i) acc += x[i] * w[i * out + o];
    }
    y[o] = acc + b[o];
  }
  return y;
}

std::vector<float> naiveConv(const std::vector<float>& x, const Shape& s,
                             const std::vector<float>& w, const std::vector<float>& b, int kh,
                             int kw, int oc, int stride, bool reorder) {
  const int H = s[0], W = s[1], C = s[2];
  const int OH = (H - kh) / stride + 1, OW = (W - kw) / stride + 1;
  std::vector<float> y(static_cast<size_t>(OH * OW * oc));
  for (int oy = 0; oy < OH; ++oy)
    for (int ox = 0; ox < OW; ++ox)
      for (int o = 0; o < oc; ++o) {
        float acc = 0;
        auto term = [&](int ky, int kx, int c) {
          return x[((oy * stride + ky) * W + ox * stride + kx) * C + c] *
                 w[((ky * kw + kx) * C + c) * oc + o];
        };
        if (!reorder) {
          for (int ky = 0; ky < kh; ++ky)
            for (int kx = 0; kx < kw; ++kx)
              for (int c = 0; c < C; ++c) acc += term(ky, kx, c);
        } else {
          for (int c = 0; c < C; ++c)
            for (int kx = kw - 1; kx >= 0; --kx)
              for (int ky = 0; ky < kh; ++ky) acc += term(ky, kx, c);
        }
        y[(oy * OW + ox) * oc + o] = acc + b[o];
      }
  (void)H;
  return y;
}

std::vector<float> naivePool(const std::vector<float>& x, const Shape& s, int ph, int pw,
                             int stride) {
  const int H = s[0], W = s[1], C = s[2];
  const int OH = (H - ph) / stride + 1, OW = (W - pw) / stride + 1;
  std::vector<float> y;
  for (int oy = 0; oy < OH; ++oy)
    for (int ox = 0; ox < OW; ++ox)
      for (int c = 0; c < C; ++c) {
        float m = -INFINITY;
        for (int py = 0; py < ph; ++py)
          for (int px = 0; px < pw; ++px)
            m = std::max(m, x[((oy * stride + py) * W + ox * stride + px) * C + c]);
        y.push_back(m);
      }
  return y;
}

void expectClose(const std::vector<float>& a, const std::vector<float>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_LE(std::fabs(a[i] - b[i]), tol * std::max(1.0, std::fabs(double(b[i])))) << i;
  }
}

TEST(Oracle, RandomDenseConvPool) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<int> dim(1, 9);
    {
      int in = dim(rng) * 3, out = dim(rng);
      auto w = randomValues(rng, in * out), b = randomValues(rng, out), x = randomValues(rng, in);
      auto got = denseGraph(in, out, w, b).eval(Tensor({in}, x)).data;
      EXPECT_EQ(got, naiveDense(x, w, b, in, out, false));
      expectClose(got, naiveDense(x, w, b, in, out, true), 1e-6);
    }
    {
      int kh = std::uniform_int_distribution<int>(1, 3)(rng);
      int kw = std::uniform_int_distribution<int>(1, 3)(rng);
      int stride = std::uniform_int_distribution<int>(1, 2)(rng);
      Shape s{kh + dim(rng), kw + dim(rng), std::uniform_int_distribution<int>(1, 4)(rng)};
      int oc = std::uniform_int_distribution<int>(1, 5)(rng);
      auto w = randomValues(rng, kh * kw * s[2] * oc), b = randomValues(rng, oc);
      auto x = randomValues(rng, shapeSize(s));
      auto got = convGraph(s, kh, kw, oc, stride, w, b).eval(Tensor(s, x)).data;
      EXPECT_EQ(got, naiveConv(x, s, w, b, kh, kw, oc, stride, false));
      expectClose(got, naiveConv(x, s, w, b, kh, kw, oc, stride, true), 1e-6);
    }
    {
      int ph = std::uniform_int_distribution<int>(1, 3)(rng);
      int stride = std::uniform_int_distribution<int>(1, 3)(rng);
      Shape s{ph + dim(rng), ph + dim(rng), std::uniform_int_distribution<int>(1, 3)(rng)};
      auto x = randomValues(rng, shapeSize(s));
      auto got = poolGraph(s, ph, ph, stride).eval(Tensor(s, x)).data;
      EXPECT_EQ(got, naivePool(x, s, ph, ph, stride));
      float maxIn = *std::max_element(x.begin(), x.end());
      for (float v : got) EXPECT_LE(v, maxIn);
    }
  }
}

TEST(Shapes, InferenceExamples) {
  OneLayer g;
  g.nodes.push_back(node("f", OpKind::Flatten, {"x"}));
  g.store->add({"w", {16, 10}, std::vector<float>(160, 0.f)});
  g.store->add({"b", {10}, std::vector<float>(10, 0.f)});
  auto d = node("d", OpKind::Dense, {"f"});
  d.outUnits = 10;
  d.weights = {"w", "b"};
  g.nodes.push_back(d);
  auto graph = g.finish({4, 4, 1}, "d");
  EXPECT_EQ(graph.inferShapes({4, 4, 1}).at("d"), (Shape{10}));

  auto conv = convGraph({8, 8, 1}, 3, 3, 2, 1, std::vector<float>(18, 0.f), {0, 0});
  EXPECT_EQ(conv.shapeOf("c"), (Shape{6, 6, 2}));

  OneLayer bad;
  bad.nodes.push_back(node("f", OpKind::Flatten, {"x"}));
  bad.nodes.push_back(node("a", OpKind::Add, {"x", "f"}));
  try {
    bad.finish({2, 2, 1}, "a");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeInconsistency);
    EXPECT_NE(std::string(e.what()).find("'a'"), std::string::npos);
  }
  EXPECT_EQ(codeOf([&] { graph.inferShapes({3, 3, 1}); }), ErrorCode::ShapeInconsistency);
}

TEST(Graph, StructuralErrors) {
  OneLayer g;
  g.nodes.push_back(node("r", OpKind::Relu, {"nowhere"}));
  EXPECT_EQ(codeOf([&] { g.finish({2}, "r"); }), ErrorCode::UnknownNode);
  OneLayer dup;
  dup.nodes.push_back(node("x", OpKind::Relu, {"x"}));
  EXPECT_EQ(codeOf([&] { dup.finish({2}, "x"); }), ErrorCode::ShapeInconsistency);
  OneLayer missing;
  auto d = node("d", OpKind::Dense, {"x"});
  d.outUnits = 1;
  d.weights = {"w", "b"};
  missing.nodes.push_back(d);
  EXPECT_EQ(codeOf([&] { missing.finish({2}, "d"); }), ErrorCode::ShapeInconsistency);
  EXPECT_EQ(codeOf([] { parseOp("gelu"); }), ErrorCode::UnknownOp);

  auto ok = denseGraph(2, 1, {1, 1}, {0});
  EXPECT_EQ(codeOf([&] { ok.eval(Tensor({3}, {1, 2, 3})); }), ErrorCode::ShapeMismatch);
  EXPECT_EQ(codeOf([&] { ok.eval(Tensor({2}, {1, 2}), "zz"); }), ErrorCode::UnknownNode);
  EXPECT_EQ(codeOf([&] { ok.truncate("zz"); }), ErrorCode::UnknownNode);
}

Tensor randomImage(std::mt19937_64& rng) {
  return Tensor({kRefSide, kRefSide, 1}, randomValues(rng, kRefSide * kRefSide, 0, 1));
}

const ComputationGraph& refNet() {
  static const ComputationGraph g = buildReferenceNetwork();
  return g;
}

TEST(ReferenceNet, ShapesAndContracts) {
  const auto& g = refNet();
  EXPECT_EQ(g.shapeOf("conv1"), (Shape{62, 62, 8}));
  EXPECT_EQ(g.shapeOf("pool2"), (Shape{14, 14, 16}));
  EXPECT_EQ(g.shapeOf(kRefFeat), (Shape{64}));
  EXPECT_EQ(g.shapeOf(kRefProbs), (Shape{2}));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    auto all = g.evalAll(randomImage(rng));
    EXPECT_EQ(all.size(), g.nodes().size());
    for (const auto& [name, t] : all) EXPECT_EQ(t.shape, g.shapeOf(name)) << name;
    const auto& p = all.at(kRefProbs).data;
    EXPECT_NEAR(double(p[0]) + p[1], 1.0, 1e-6);
    for (float v : all.at(kRefFeatRelu).data) EXPECT_GE(v, 0.0f);
    for (float v : all.at("relu1").data) EXPECT_GE(v, 0.0f);
  }
  for (const auto& b : g.weights()->blocks()) {
    for (float v : b.values) {
      EXPECT_GE(v, -0.1f);
      EXPECT_LE(v, 0.1f);
    }
  }
}

// Property: truncating at any node and evaluating equals the intermediate
// value of a full evaluation, bitwise.
TEST(Truncate, SubgraphConsistency) {
  const auto& g = refNet();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 4; ++i) {
    auto x = randomImage(rng);
    auto all = g.evalAll(x);
    for (const auto& n : g.nodes()) {
      auto t = g.truncate(n.name);
      EXPECT_EQ(t.outputName(), n.name);
      EXPECT_TRUE(t.eval(x).sameBits(all.at(n.name))) << n.name;
      EXPECT_TRUE(g.eval(x, n.name).sameBits(all.at(n.name))) << n.name;
    }
  }
}

TEST(Truncate, FixedPointAndInput) {
  const auto& g = refNet();
  auto same = g.truncate(g.outputName());
  EXPECT_EQ(same.nodes(), g.nodes());
  EXPECT_EQ(same.weights(), g.weights());
  auto input = g.truncate(kRefInput);
  EXPECT_EQ(input.nodes().size(), 1u);
  std::mt19937_64 rng(1);
  auto x = randomImage(rng);
  EXPECT_TRUE(input.eval(x).sameBits(x));
  auto rn1 = g.truncate(kRefFeatRelu);
  EXPECT_FALSE(rn1.hasNode("logits"));
  EXPECT_TRUE(rn1.hasNode(kRefFeat));
}

TEST(Batch, MatchesSingleEvalsBitwise) {
  const auto& g = refNet();
  std::mt19937_64 rng(9);
  std::vector<Tensor> batch;
  for (int i = 0; i < 5; ++i) batch.push_back(randomImage(rng));
  std::vector<Tensor> singles;
  for (const auto& x : batch) singles.push_back(g.eval(x, kRefFeat));
  for (int mb : {1, 2, 3, 5, 64}) {
    int64_t batches = 0;
    auto out = g.evalBatch(batch, mb, kRefFeat, &batches);
    ASSERT_EQ(out.size(), 5u);
    EXPECT_EQ(batches, (5 + mb - 1) / mb);
    for (size_t i = 0; i < out.size(); ++i) EXPECT_TRUE(out[i].sameBits(singles[i]));
  }
  EXPECT_TRUE(g.evalBatch({}, 4).empty());
  EXPECT_EQ(codeOf([&] { g.evalBatch(batch, 0); }), ErrorCode::InvalidArgument);
}


TEST(ModelFiles, RoundTripIsBitExact) {
  TempDir tmp;
  const auto& g = refNet();
  saveGraph(g, tmp.path() / "ref.tgraph");
  auto back = loadGraph(tmp.path() / "ref.tgraph");
  EXPECT_EQ(back.nodes(), g.nodes());
  EXPECT_EQ(graphBlob(back), graphBlob(g));
  std::mt19937_64 rng(2);
  auto x = randomImage(rng);
  EXPECT_TRUE(back.eval(x).sameBits(g.eval(x)));
  auto text = readFileBytes(tmp.path() / "ref.tgraph");
  EXPECT_EQ(std::string(text.begin(), text.end()), graphManifest(g, "ref.bin"));

  auto bundled = unbundleGraph(bundleGraphFiles(tmp.path() / "ref.tgraph"));
  EXPECT_EQ(graphBlob(bundled), graphBlob(g));
  EXPECT_EQ(graphBlob(unbundleGraph(bundleGraph(g))), graphBlob(g));
}

TEST(ModelFiles, TruncatedGraphKeepsOnlyUsedBlocks) {
  auto rn2 = refNet().truncate(kRefFeat);
  auto back = parseGraph(graphManifest(rn2, "x.bin"), graphBlob(rn2));
  EXPECT_EQ(back.weights()->blocks().size(), 6u);
  EXPECT_EQ(back.outputName(), kRefFeat);
}

TEST(ModelFiles, Corruption) {
  TempDir tmp;
  saveGraph(refNet(), tmp.path() / "ref.tgraph");
  auto blob = readFileBytes(tmp.path() / "ref.bin");
  blob[blob.size() / 2] ^= 0x01;
  writeFileBytes(tmp.path() / "ref.bin", blob);
  EXPECT_EQ(codeOf([&] { loadGraph(tmp.path() / "ref.tgraph"); }), ErrorCode::ChecksumMismatch);

  auto manifest = graphManifest(refNet(), "ref.bin");
  auto good = graphBlob(refNet());
  EXPECT_EQ(codeOf([&] { parseGraph("TGRAPH2\n" + manifest.substr(8), good); }),
            ErrorCode::BadMagic);
  auto gelu = manifest;
  gelu.replace(gelu.find("relu1 relu"), 10, "relu1 gelu");
  EXPECT_EQ(codeOf([&] { parseGraph(gelu, good); }), ErrorCode::UnknownOp);
  auto shortBlob = std::vector<uint8_t>(good.begin(), good.end() - 4);
  EXPECT_EQ(codeOf([&] { parseGraph(manifest, shortBlob); }), ErrorCode::ChecksumMismatch);
  auto badShape = manifest;
  badShape.replace(badShape.find("outUnits=64"), 11, "outUnits=65");
  EXPECT_EQ(codeOf([&] { parseGraph(badShape, good); }), ErrorCode::ShapeInconsistency);
  auto bundle = bundleGraph(refNet());
  bundle.pop_back();
  EXPECT_EQ(codeOf([&] { unbundleGraph(bundle); }), ErrorCode::ChecksumMismatch);
}

TEST(ModelFiles, GoldenFilesLoadAndEvaluate) {
  const fs::path dir = fs::path(TUNDRA_TEST_DATA_DIR) / "golden";
  auto tiny = loadGraph(dir / "tiny.tgraph");
  auto expected = readFileBytes(dir / "tiny_expected.bin");
  Tensor x(tiny.inputShape());
  for (size_t i = 0; i < x.data.size(); ++i) x.data[i] = static_cast<float>(i % 7) / 7.0f;
  auto out = tiny.eval(x);
  std::vector<uint8_t> bits;
  for (float f : out.data) putF32(bits, f);
  EXPECT_EQ(bits, expected);
  // The reference network is regenerated from its seed; its blob is frozen.
  auto pinned = readFileBytes(dir / "reference_blob.sha256");
  ASSERT_GE(pinned.size(), 64u);
  EXPECT_EQ(sha256Hex(graphBlob(refNet())), std::string(pinned.begin(), pinned.begin() + 64));
}

}  // namespace
}  // namespace tundra
