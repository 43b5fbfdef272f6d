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

#include "tundra/graph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tundra/common/error.hpp"

namespace tundra {

namespace {

constexpr std::pair<OpKind, std::string_view> kOps[] = {
    {OpKind::Input, "input"},         {OpKind::Dense, "dense"},
    {OpKind::Relu, "relu"},           {OpKind::Conv2d, "conv2d"},
    {OpKind::MaxPool2d, "maxpool2d"}, {OpKind::Flatten, "flatten"},
    {OpKind::Softmax, "softmax"},     {OpKind::Add, "add"},
};

size_t arity(OpKind op) {
  switch (op) {
    case OpKind::Input: return 0;
    case OpKind::Add: return 2;
    default: return 1;
  }
}

[[noreturn]] void inconsistent(const GraphNode& n, const std::string& why) {
  throw Error(ErrorCode::ShapeInconsistency, "node '" + n.name + "': " + why);
}

// ---- kernels ---------------------------------------------------------------
//
// Every output element is accumulated from 0 in a fixed order and its bias is
// added last. Loops run over outputs innermost, which keeps each element's
// order independent of batch size and lets the compiler vectorize safely.

void denseKernel(const float* in, int64_t count, int inDim, const float* w, const float* bias,
                 int outDim, float* out) {
  for (int64_t b = 0; b < count; ++b) {
    const float* x = in + b * inDim;
    float* o = out + b * outDim;
    std::fill(o, o + outDim, 0.0f);
    for (int i = 0; i < inDim; ++i) {
      const float xi = x[i];
      const float* wr = w + static_cast<int64_t>(i) * outDim;
      for (int j = 0; j < outDim; ++j) o[j] += xi * wr[j];
    }
    for (int j = 0; j < outDim; ++j) o[j] = o[j] + bias[j];
  }
}

void conv2dKernel(const float* in, int64_t count, const Shape& inShape, const float* k,
                  const float* bias, int kh, int kw, int oc, int stride, const Shape& outShape,
                  float* out) {
  const int H = inShape[0], W = inShape[1], C = inShape[2];
  const int OH = outShape[0], OW = outShape[1];
  const int64_t inSize = static_cast<int64_t>(H) * W * C;
  const int64_t outSize = static_cast<int64_t>(OH) * OW * oc;
  const int64_t plane = static_cast<int64_t>(H) * W;
  // Channel planes of one input, so each output row is a contiguous sweep.
  std::vector<float> planar(static_cast<size_t>(inSize));
  std::vector<float> acc(static_cast<size_t>(OW));
  for (int64_t b = 0; b < count; ++b) {
    const float* x = in + b * inSize;
    float* y = out + b * outSize;
    for (int64_t p = 0; p < plane; ++p) {
      for (int c = 0; c < C; ++c) planar[static_cast<size_t>(c * plane + p)] = x[p * C + c];
    }
    for (int oy = 0; oy < OH; ++oy) {
      for (int j = 0; j < oc; ++j) {
        std::fill(acc.begin(), acc.end(), 0.0f);
        float* a = acc.data();
        for (int ky = 0; ky < kh; ++ky) {
          for (int kx = 0; kx < kw; ++kx) {
            for (int c = 0; c < C; ++c) {
              const float w = k[((static_cast<int64_t>(ky) * kw + kx) * C + c) * oc + j];
              const float* row =
                  planar.data() + c * plane + static_cast<int64_t>(oy * stride + ky) * W + kx;
              if (stride == 1) {
                for (int ox = 0; ox < OW; ++ox) a[ox] += row[ox] * w;
              } else {
                for (int ox = 0; ox < OW; ++ox) a[ox] += row[static_cast<int64_t>(ox) * stride] * w;
              }
            }
          }
        }
        float* o = y + static_cast<int64_t>(oy) * OW * oc + j;
        for (int ox = 0; ox < OW; ++ox) o[static_cast<int64_t>(ox) * oc] = a[ox] + bias[j];
      }
    }
  }
}

void maxpoolKernel(const float* in, int64_t count, const Shape& inShape, int ph, int pw,
                   int stride, const Shape& outShape, float* out) {
  const int W = inShape[1], C = inShape[2];
  const int OH = outShape[0], OW = outShape[1];
  const int64_t inSize = shapeSize(inShape);
  const int64_t outSize = shapeSize(outShape);
  for (int64_t b = 0; b < count; ++b) {
    const float* x = in + b * inSize;
    float* y = out + b * outSize;
    for (int oy = 0; oy < OH; ++oy) {
      for (int ox = 0; ox < OW; ++ox) {
        for (int c = 0; c < C; ++c) {
          float m = x[(static_cast<int64_t>(oy * stride) * W + ox * stride) * C + c];
          for (int py = 0; py < ph; ++py) {
            for (int px = 0; px < pw; ++px) {
              float v = x[(static_cast<int64_t>(oy * stride + py) * W + ox * stride + px) * C + c];
              if (v > m) m = v;
            }
          }
          y[(static_cast<int64_t>(oy) * OW + ox) * C + c] = m;
        }
      }
    }
  }
}

void softmaxKernel(const float* in, int64_t rows, int n, float* out) {
  std::vector<double> e(static_cast<size_t>(n));
  for (int64_t r = 0; r < rows; ++r) {
    const float* x = in + r * n;
    float* y = out + r * n;
    float m = x[0];
    for (int i = 1; i < n; ++i) m = std::max(m, x[i]);
    double sum = 0;
    for (int i = 0; i < n; ++i) {
      e[static_cast<size_t>(i)] = std::exp(static_cast<double>(x[i]) - static_cast<double>(m));
      sum += e[static_cast<size_t>(i)];
    }
    for (int i = 0; i < n; ++i) y[i] = static_cast<float>(e[static_cast<size_t>(i)] / sum);
  }
}

}  // namespace

std::string_view opName(OpKind op) {
  for (const auto& [k, n] : kOps) {
    if (k == op) return n;
  }
  return "?";
}

OpKind parseOp(std::string_view name) {
  for (const auto& [k, n] : kOps) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::UnknownOp, "unknown op '" + std::string(name) + "'");
}

void WeightStore::add(WeightBlock block) {
  if (index_.count(block.name)) {
    throw Error(ErrorCode::InvalidArgument, "duplicate weight block '" + block.name + "'");
  }
  if (static_cast<int64_t>(block.values.size()) != shapeSize(block.dims)) {
    throw Error(ErrorCode::ShapeInconsistency, "weight block '" + block.name + "' has " +
                                                   std::to_string(block.values.size()) +
                                                   " values for dims " + shapeString(block.dims));
  }
  index_.emplace(block.name, blocks_.size());
  blocks_.push_back(std::move(block));
}

const WeightBlock* WeightStore::find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &blocks_[it->second];
}

ComputationGraph::ComputationGraph(std::vector<GraphNode> nodes, std::string inputName,
                                   Shape inputShape, std::string outputName,
                                   std::shared_ptr<const WeightStore> weights)
    : nodes_(std::move(nodes)),
      inputName_(std::move(inputName)),
      inputShape_(std::move(inputShape)),
      outputName_(std::move(outputName)),
      weights_(weights ? std::move(weights) : std::make_shared<const WeightStore>()) {
  int inputs = 0;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.name.empty()) throw Error(ErrorCode::ShapeInconsistency, "node with empty name");
    if (!index_.emplace(n.name, i).second) inconsistent(n, "duplicate node name");
    if (n.inputs.size() != arity(n.op)) {
      inconsistent(n, std::string(opName(n.op)) + " takes " + std::to_string(arity(n.op)) +
                          " inputs, got " + std::to_string(n.inputs.size()));
    }
    for (const auto& in : n.inputs) {
      auto it = index_.find(in);
      if (it == index_.end() || it->second >= i) {
        throw Error(ErrorCode::UnknownNode, "node '" + n.name + "' reads '" + in +
                                                "', which is not an earlier node");
      }
    }
    if (n.op == OpKind::Input) {
      ++inputs;
      if (n.name != inputName_) inconsistent(n, "input node is not the declared input");
    }
    const size_t wanted = (n.op == OpKind::Dense || n.op == OpKind::Conv2d) ? 2 : 0;
    if (n.weights.size() != wanted) {
      inconsistent(n, "expects " + std::to_string(wanted) + " weight blocks");
    }
    for (const auto& w : n.weights) {
      if (!weights_->find(w)) inconsistent(n, "weight block '" + w + "' not found");
    }
  }
  if (inputs != 1) {
    throw Error(ErrorCode::ShapeInconsistency, "graph needs exactly one input node");
  }
  if (!index_.count(outputName_)) {
    throw Error(ErrorCode::UnknownNode, "output node '" + outputName_ + "' not in graph");
  }
  auto shapes = inferShapes(inputShape_);
  shapes_.resize(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) shapes_[i] = shapes.at(nodes_[i].name);
}

size_t ComputationGraph::indexOf(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw Error(ErrorCode::UnknownNode, "no node named '" + std::string(name) + "'");
  }
  return it->second;
}

bool ComputationGraph::hasNode(std::string_view name) const { return index_.count(name) > 0; }

const GraphNode& ComputationGraph::node(std::string_view name) const {
  return nodes_[indexOf(name)];
}

const Shape& ComputationGraph::shapeOf(std::string_view name) const {
  return shapes_[indexOf(name)];
}

std::map<std::string, Shape> ComputationGraph::inferShapes(const Shape& inputShape) const {
  std::map<std::string, Shape> out;
  for (int d : inputShape) {
    if (d < 1) throw Error(ErrorCode::ShapeInconsistency, "input dims must be >= 1");
  }
  if (inputShape.empty()) throw Error(ErrorCode::ShapeInconsistency, "input shape is empty");
  for (const auto& n : nodes_) {
    auto in = [&](size_t i) -> const Shape& { return out.at(n.inputs[i]); };
    auto weight = [&](size_t i) -> const Shape& { return weights_->find(n.weights[i])->dims; };
    Shape s;
    switch (n.op) {
      case OpKind::Input: s = inputShape; break;
      case OpKind::Relu:
      case OpKind::Softmax: s = in(0); break;
      case OpKind::Flatten: s = {static_cast<int>(shapeSize(in(0)))}; break;
      case OpKind::Add:
        if (in(0) != in(1)) {
          inconsistent(n, "add of " + shapeString(in(0)) + " and " + shapeString(in(1)));
        }
        s = in(0);
        break;
      case OpKind::Dense: {
        if (in(0).size() != 1) inconsistent(n, "dense needs a rank-1 input, got " + shapeString(in(0)));
        if (n.outUnits < 1) inconsistent(n, "outUnits must be >= 1");
        if (weight(0) != Shape{in(0)[0], n.outUnits}) {
          inconsistent(n, "kernel dims " + shapeString(weight(0)) + " do not match " +
                              shapeString({in(0)[0], n.outUnits}));
        }
        if (weight(1) != Shape{n.outUnits}) inconsistent(n, "bias dims " + shapeString(weight(1)));
        s = {n.outUnits};
        break;
      }
      case OpKind::Conv2d: {
        const Shape& x = in(0);
        if (x.size() != 3) inconsistent(n, "conv2d needs height,width,channels input");
        if (n.kernelH < 1 || n.kernelW < 1 || n.outChannels < 1 || n.stride < 1) {
          inconsistent(n, "conv2d attributes must be >= 1");
        }
        if (x[0] < n.kernelH || x[1] < n.kernelW) {
          inconsistent(n, "kernel larger than input " + shapeString(x));
        }
        if (weight(0) != Shape{n.kernelH, n.kernelW, x[2], n.outChannels}) {
          inconsistent(n, "kernel dims " + shapeString(weight(0)) + " do not match " +
                              shapeString({n.kernelH, n.kernelW, x[2], n.outChannels}));
        }
        if (weight(1) != Shape{n.outChannels}) inconsistent(n, "bias dims " + shapeString(weight(1)));
        s = {(x[0] - n.kernelH) / n.stride + 1, (x[1] - n.kernelW) / n.stride + 1, n.outChannels};
        break;
      }
      case OpKind::MaxPool2d: {
        const Shape& x = in(0);
        if (x.size() != 3) inconsistent(n, "maxpool2d needs height,width,channels input");
        if (n.poolH < 1 || n.poolW < 1 || n.stride < 1) inconsistent(n, "pool attributes must be >= 1");
        if (x[0] < n.poolH || x[1] < n.poolW) inconsistent(n, "window larger than input");
        s = {(x[0] - n.poolH) / n.stride + 1, (x[1] - n.poolW) / n.stride + 1, x[2]};
        break;
      }
    }
    out[n.name] = std::move(s);
  }
  return out;
}

std::vector<size_t> ComputationGraph::closure(size_t target) const {
  std::vector<bool> need(nodes_.size(), false);
  need[target] = true;
  for (size_t i = target + 1; i-- > 0;) {
    if (!need[i]) continue;
    for (const auto& in : nodes_[i].inputs) need[index_.find(in)->second] = true;
  }
  std::vector<size_t> out;
  for (size_t i = 0; i <= target; ++i) {
    if (need[i]) out.push_back(i);
  }
  return out;
}

std::vector<float> ComputationGraph::runBatch(std::span<const float> inputs, int64_t count,
                                              size_t target,
                                              std::vector<std::vector<float>>* keepAll) const {
  const int64_t inSize = shapeSize(inputShape_);
  if (static_cast<int64_t>(inputs.size()) != inSize * count) {
    throw Error(ErrorCode::ShapeMismatch,
                "expected " + std::to_string(count) + " inputs of shape " + shapeString(inputShape_));
  }
  auto order = closure(target);
  std::vector<std::vector<float>> values(nodes_.size());
  for (size_t i : order) {
    const GraphNode& n = nodes_[i];
    const Shape& shape = shapes_[i];
    const int64_t outSize = shapeSize(shape);
    std::vector<float>& out = values[i];
    out.resize(static_cast<size_t>(outSize * count));
    auto inputOf = [&](size_t k) -> const std::vector<float>& {
      return values[index_.find(n.inputs[k])->second];
    };
    auto shapeOfInput = [&](size_t k) -> const Shape& {
      return shapes_[index_.find(n.inputs[k])->second];
    };
    switch (n.op) {
      case OpKind::Input: std::copy(inputs.begin(), inputs.end(), out.begin()); break;
      case OpKind::Flatten: out = inputOf(0); break;
      case OpKind::Relu: {
        const auto& x = inputOf(0);
        for (size_t j = 0; j < out.size(); ++j) out[j] = x[j] > 0.0f ? x[j] : 0.0f;
        break;
      }
      case OpKind::Add: {
        const auto& a = inputOf(0);
        const auto& b = inputOf(1);
        for (size_t j = 0; j < out.size(); ++j) out[j] = a[j] + b[j];
        break;
      }
      case OpKind::Softmax: {
        const int last = shape.back();
        softmaxKernel(inputOf(0).data(), outSize * count / last, last, out.data());
        break;
      }
      case OpKind::Dense:
        denseKernel(inputOf(0).data(), count, shapeOfInput(0)[0],
                    weights_->find(n.weights[0])->values.data(),
                    weights_->find(n.weights[1])->values.data(), n.outUnits, out.data());
        break;
      case OpKind::Conv2d:
        conv2dKernel(inputOf(0).data(), count, shapeOfInput(0),
                     weights_->find(n.weights[0])->values.data(),
                     weights_->find(n.weights[1])->values.data(), n.kernelH, n.kernelW,
                     n.outChannels, n.stride, shape, out.data());
        break;
      case OpKind::MaxPool2d:
        maxpoolKernel(inputOf(0).data(), count, shapeOfInput(0), n.poolH, n.poolW, n.stride, shape,
                      out.data());
        break;
    }
  }
  if (keepAll) {
    *keepAll = values;
  }
  return std::move(values[target]);
}

Tensor ComputationGraph::eval(const Tensor& input, std::string_view outputNode) const {
  const size_t target = indexOf(outputNode.empty() ? std::string_view(outputName_) : outputNode);
  if (input.shape != inputShape_) {
    throw Error(ErrorCode::ShapeMismatch, "input shape " + shapeString(input.shape) +
                                              " differs from declared " + shapeString(inputShape_));
  }
  return Tensor(shapes_[target], runBatch(input.data, 1, target, nullptr));
}

std::map<std::string, Tensor> ComputationGraph::evalAll(const Tensor& input) const {
  if (input.shape != inputShape_) {
    throw Error(ErrorCode::ShapeMismatch, "input shape " + shapeString(input.shape) +
                                              " differs from declared " + shapeString(inputShape_));
  }
  std::map<std::string, Tensor> out;
  if (nodes_.empty()) return out;
  std::vector<std::vector<float>> all;
  // Run to the last node; nodes outside its ancestry are evaluated separately.
  std::set<size_t> done;
  for (size_t t = nodes_.size(); t-- > 0;) {
    if (done.count(t)) continue;
    runBatch(input.data, 1, t, &all);
    for (size_t i : closure(t)) {
      if (done.insert(i).second) out.emplace(nodes_[i].name, Tensor(shapes_[i], all[i]));
    }
  }
  return out;
}

std::vector<float> ComputationGraph::evalFlat(std::span<const float> inputs, int64_t count,
                                              std::string_view outputNode) const {
  const size_t target = indexOf(outputNode.empty() ? std::string_view(outputName_) : outputNode);
  if (count == 0) return {};
  return runBatch(inputs, count, target, nullptr);
}

std::vector<Tensor> ComputationGraph::evalBatch(std::span<const Tensor> batch, int miniBatchSize,
                                                std::string_view outputNode,
                                                int64_t* batchesRun) const {
  if (miniBatchSize < 1) throw Error(ErrorCode::InvalidArgument, "miniBatchSize must be >= 1");
  const size_t target = indexOf(outputNode.empty() ? std::string_view(outputName_) : outputNode);
  const int64_t inSize = shapeSize(inputShape_);
  const int64_t outSize = shapeSize(shapes_[target]);
  std::vector<Tensor> out;
  out.reserve(batch.size());
  std::vector<float> flat;
  for (size_t start = 0; start < batch.size(); start += static_cast<size_t>(miniBatchSize)) {
    const size_t end = std::min(batch.size(), start + static_cast<size_t>(miniBatchSize));
    flat.clear();
    flat.reserve(static_cast<size_t>(inSize) * (end - start));
    for (size_t i = start; i < end; ++i) {
      if (batch[i].shape != inputShape_) {
        throw Error(ErrorCode::ShapeMismatch, "batch item " + std::to_string(i) + " has shape " +
                                                  shapeString(batch[i].shape));
      }
      flat.insert(flat.end(), batch[i].data.begin(), batch[i].data.end());
    }
    auto res = runBatch(flat, static_cast<int64_t>(end - start), target, nullptr);
    if (batchesRun) ++*batchesRun;
    for (size_t i = 0; i < end - start; ++i) {
      out.emplace_back(shapes_[target],
                       std::vector<float>(res.begin() + static_cast<int64_t>(i) * outSize,
                                          res.begin() + static_cast<int64_t>(i + 1) * outSize));
    }
  }
  return out;
}

ComputationGraph ComputationGraph::truncate(std::string_view nodeName) const {
  const size_t target = indexOf(nodeName);
  std::vector<GraphNode> kept;
  for (size_t i : closure(target)) kept.push_back(nodes_[i]);
  bool hasInput = std::any_of(kept.begin(), kept.end(),
                              [](const GraphNode& n) { return n.op == OpKind::Input; });
  if (!hasInput) {
    throw Error(ErrorCode::UnknownNode, "node '" + std::string(nodeName) +
                                            "' is not reachable from the input");
  }
  return ComputationGraph(std::move(kept), inputName_, inputShape_, std::string(nodeName),
                          weights_);
}

}  // namespace tundra
