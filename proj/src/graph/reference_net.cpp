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

#include "tundra/graph/reference_net.hpp"

#include <random>

namespace tundra {

namespace {

class UniformWeights {
 public:
  explicit UniformWeights(uint64_t seed) : rng_(seed) {}

  WeightBlock block(std::string name, Shape dims) {
    WeightBlock b{std::move(name), std::move(dims), {}};
    b.values.resize(static_cast<size_t>(shapeSize(b.dims)));
    for (float& v : b.values) {
      // 53 random bits mapped onto [0, 1), then onto [-0.1, 0.1).
      const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
      v = static_cast<float>(-0.1 + 0.2 * u);
    }
    return b;
  }

 private:
  std::mt19937_64 rng_;
};

GraphNode make(std::string name, OpKind op, std::vector<std::string> inputs) {
  GraphNode n;
  n.name = std::move(name);
  n.op = op;
  n.inputs = std::move(inputs);
  return n;
}

struct Builder {
  explicit Builder(uint64_t seed) : gen(seed) {}

  void input(const std::string& name) { nodes.push_back(make(name, OpKind::Input, {})); }
  void unary(const std::string& name, OpKind op, const std::string& in) {
    nodes.push_back(make(name, op, {in}));
  }
  void conv(const std::string& name, const std::string& in, int ic, int oc) {
    GraphNode n = make(name, OpKind::Conv2d, {in});
    n.kernelH = n.kernelW = 3;
    n.outChannels = oc;
    n.stride = 1;
    store->add(gen.block(name + ".w", {3, 3, ic, oc}));
    store->add(gen.block(name + ".b", {oc}));
    n.weights = {name + ".w", name + ".b"};
    nodes.push_back(std::move(n));
  }
  void pool(const std::string& name, const std::string& in) {
    GraphNode n = make(name, OpKind::MaxPool2d, {in});
    n.poolH = n.poolW = 2;
    n.stride = 2;
    nodes.push_back(std::move(n));
  }
  void dense(const std::string& name, const std::string& in, int inDim, int out) {
    GraphNode n = make(name, OpKind::Dense, {in});
    n.outUnits = out;
    store->add(gen.block(name + ".w", {inDim, out}));
    store->add(gen.block(name + ".b", {out}));
    n.weights = {name + ".w", name + ".b"};
    nodes.push_back(std::move(n));
  }

  UniformWeights gen;
  std::shared_ptr<WeightStore> store = std::make_shared<WeightStore>();
  std::vector<GraphNode> nodes;
};

}  // namespace

ComputationGraph buildReferenceNetwork(uint64_t seed) {
  Builder b(seed);
  b.input(kRefInput);
  b.conv("conv1", kRefInput, 1, 8);
  b.unary("relu1", OpKind::Relu, "conv1");
  b.pool("pool1", "relu1");
  b.conv("conv2", "pool1", 8, 16);
  b.unary("relu2", OpKind::Relu, "conv2");
  b.pool("pool2", "relu2");
  b.unary("flatten", OpKind::Flatten, "pool2");
  b.dense(kRefFeat, "flatten", 14 * 14 * 16, 64);
  b.unary(kRefFeatRelu, OpKind::Relu, kRefFeat);
  b.dense("logits", kRefFeatRelu, 64, 2);
  b.unary(kRefProbs, OpKind::Softmax, "logits");
  return ComputationGraph(std::move(b.nodes), kRefInput, {kRefSide, kRefSide, 1}, kRefProbs,
                          std::move(b.store));
}

ComputationGraph buildTinyNetwork(uint64_t seed) {
  Builder b(seed);
  b.input("data");
  b.conv("conv", "data", 1, 2);
  b.unary("relu", OpKind::Relu, "conv");
  b.pool("pool", "relu");
  b.unary("flatten", OpKind::Flatten, "pool");
  b.dense("dense", "flatten", 8, 3);
  b.unary("probs", OpKind::Softmax, "dense");
  return ComputationGraph(std::move(b.nodes), "data", {6, 6, 1}, "probs", std::move(b.store));
}

}  // namespace tundra
