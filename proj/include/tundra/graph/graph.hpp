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

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tundra/graph/tensor.hpp"

namespace tundra {

enum class OpKind { Input, Dense, Relu, Conv2d, MaxPool2d, Flatten, Softmax, Add };

std::string_view opName(OpKind op);
// Throws UnknownOp.
OpKind parseOp(std::string_view name);

struct GraphNode {
  std::string name;
  OpKind op = OpKind::Input;
  std::vector<std::string> inputs;
  // dense
  int outUnits = 0;
  // conv2d
  int kernelH = 0;
  int kernelW = 0;
  int outChannels = 0;
  // maxpool2d
  int poolH = 0;
  int poolW = 0;
  // conv2d, maxpool2d
  int stride = 1;
  // Weight block names: [kernel, bias] for dense and conv2d.
  std::vector<std::string> weights;

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct WeightBlock {
  std::string name;
  Shape dims;
  std::vector<float> values;
};

// Named f32 blocks in insertion order. Shared read-only between a graph and
// its truncations.
class WeightStore {
 public:
  void add(WeightBlock block);  // throws InvalidArgument on duplicate names
  const WeightBlock* find(std::string_view name) const;
  const std::vector<WeightBlock>& blocks() const { return blocks_; }

 private:
  std::vector<WeightBlock> blocks_;
  std::map<std::string, size_t, std::less<>> index_;
};

// Immutable, validated feed-forward graph. Nodes are topologically ordered.
// All evaluation entry points are safe to call concurrently.
class ComputationGraph {
 public:
  // Validates names, topology, arity, weight references and shapes.
  // Throws UnknownNode / ShapeInconsistency / InvalidArgument.
  ComputationGraph(std::vector<GraphNode> nodes, std::string inputName, Shape inputShape,
                   std::string outputName, std::shared_ptr<const WeightStore> weights);

  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::string& inputName() const { return inputName_; }
  const std::string& outputName() const { return outputName_; }
  const Shape& inputShape() const { return inputShape_; }
  const std::shared_ptr<const WeightStore>& weights() const { return weights_; }
  const GraphNode& node(std::string_view name) const;  // throws UnknownNode
  bool hasNode(std::string_view name) const;

  // Static shapes for an input shape. Throws ShapeInconsistency naming the
  // offending node.
  std::map<std::string, Shape> inferShapes(const Shape& inputShape) const;
  const Shape& shapeOf(std::string_view name) const;

  // Evaluates `outputNode` (default: the graph output). Throws ShapeMismatch
  // when the input shape differs from the declared one.
  Tensor eval(const Tensor& input, std::string_view outputNode = {}) const;
  // Evaluates every node; used to observe intermediates.
  std::map<std::string, Tensor> evalAll(const Tensor& input) const;

  // Evaluates in groups of `miniBatchSize`, each group through one batched
  // pass. Results are in input order and bitwise equal to per-item eval.
  // `batchesRun`, when given, is incremented once per group.
  std::vector<Tensor> evalBatch(std::span<const Tensor> batch, int miniBatchSize,
                                std::string_view outputNode = {},
                                int64_t* batchesRun = nullptr) const;
  // Flat variant: `count` inputs of the input size laid out back to back.
  std::vector<float> evalFlat(std::span<const float> inputs, int64_t count,
                              std::string_view outputNode = {}) const;

  // Ancestor closure of `nodeName`, with that node as output. Weights are
  // shared. Throws UnknownNode.
  ComputationGraph truncate(std::string_view nodeName) const;

 private:
  std::vector<size_t> closure(size_t target) const;
  size_t indexOf(std::string_view name) const;
  std::vector<float> runBatch(std::span<const float> inputs, int64_t count, size_t target,
                              std::vector<std::vector<float>>* keepAll) const;

  std::vector<GraphNode> nodes_;
  std::string inputName_;
  Shape inputShape_;
  std::string outputName_;
  std::shared_ptr<const WeightStore> weights_;
  std::map<std::string, size_t, std::less<>> index_;
  std::vector<Shape> shapes_;
};

}  // namespace tundra
