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

#include "tundra/image/stages.hpp"

#include <cstdio>

#include "tundra/common/hash.hpp"

namespace tundra {

namespace {

Schema replaceOrAppend(const Schema& in, const Column& col) {
  if (!in.has(col.name)) return in.withColumn(col);
  std::vector<Column> cols = in.columns();
  cols[in.indexOf(col.name)] = col;
  return Schema(std::move(cols));
}

std::string rowLabel(const TaskContext& ctx, size_t i, const Cell& c) {
  std::string s = "partition " + std::to_string(ctx.partition()) + " row " + std::to_string(i);
  if (std::holds_alternative<ImageRecord>(c) && !std::get<ImageRecord>(c).path.empty()) {
    s += " (" + std::get<ImageRecord>(c).path + ")";
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------- transformer

const StageDescriptor& ImageTransformer::describe() {
  static const StageDescriptor d{
      "ImageTransformer",
      StageKind::Transformer,
      "Applies a chain of image ops to an Image column.",
      {{"inputCol", ParamKind::Column, std::string("image"), "Image input column."},
       {"outputCol", ParamKind::Column, std::string("transformed"),
        "Output column; replaced when it already exists."},
       {"ops", ParamKind::StringList, std::nullopt,
        "Ops in order: resize:W:H[:nearest|bilinear], cropCenter:W:H, flipHorizontal, "
        "grayscale, normalize[:SCALE:OFFSET], toVector."}}};
  return d;
}

ImageTransformer::ImageTransformer(ParamMap params) : StageImpl(describe(), std::move(params)) {
  finishConfigure();
}

void ImageTransformer::validateParams() const {
  if (hasParam("ops")) chain();
}

ImageOpChain ImageTransformer::chain() const { return ImageOpChain::parse(getStringList("ops")); }

Schema ImageTransformer::transformSchema(const Schema& in) const {
  requireColumn(in, getString("inputCol"), DType::Image);
  const DType out = chain().producesVector() ? DType::FloatVector : DType::Image;
  return replaceOrAppend(in, {getString("outputCol"), out, nullptr});
}

Dataset ImageTransformer::transform(const Dataset& ds) const {
  Schema outSchema = transformSchema(ds.schema());
  const size_t inCol = ds.schema().indexOf(getString("inputCol"));
  const auto outCol = outSchema.indexOf(getString("outputCol"));
  const bool append = outCol == ds.schema().size();
  const ImageOpChain ops = chain();
  PartitionFn fn = [=](const Rows& rows, TaskContext& ctx) {
    Rows out;
    out.reserve(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      const Cell& c = rows[i][inCol];
      Cell result = Null{};
      if (!isNull(c)) {
        try {
          result = std::visit([](auto&& v) -> Cell { return std::move(v); },
                              applyChain(asImage(c), ops));
        } catch (const Error& e) {
          throw Error(e.code(), rowLabel(ctx, i, c) + ": " + e.what());
        }
      }
      if (append) {
        out.push_back(appendCell(rows[i], std::move(result)));
      } else {
        Row r = rows[i];
        r.values[outCol] = std::move(result);
        out.push_back(std::move(r));
      }
    }
    return out;
  };
  return ds.mapPartitions(std::move(fn), std::move(outSchema), "ImageTransformer");
}

// ------------------------------------------------------------------ augmenter

const StageDescriptor& ImageSetAugmenter::describe() {
  static const StageDescriptor d{
      "ImageSetAugmenter",
      StageKind::Transformer,
      "Adds a horizontally flipped copy of every row, tagged by parity and origin id.",
      {{"inputCol", ParamKind::Column, std::string("image"), "Image column to flip."},
       {"mode", ParamKind::String, std::string("train"), "train or score."},
       {"parityCol", ParamKind::Column, std::string("parity"), "Int64 column: 0 original, 1 flipped."},
       {"originCol", ParamKind::Column, std::string("originId"),
        "String column shared by a row and its flipped copy."}}};
  return d;
}

ImageSetAugmenter::ImageSetAugmenter(ParamMap params) : StageImpl(describe(), std::move(params)) {
  finishConfigure();
}

void ImageSetAugmenter::validateParams() const {
  const auto mode = getString("mode");
  if (mode != "train" && mode != "score") {
    throw Error(ErrorCode::InvalidParam, "mode must be train or score, got '" + mode + "'");
  }
  if (getString("parityCol") == getString("originCol")) {
    throw Error(ErrorCode::InvalidParam, "parityCol and originCol must differ");
  }
}

std::string imageOriginId(const ImageRecord& img) {
  if (!img.path.empty()) return img.path;
  uint64_t h = fnv1a64(std::span<const uint8_t>(img.data));
  h = fnv1a64(std::to_string(img.width) + "x" + std::to_string(img.height), h);
  char buf[24];
  std::snprintf(buf, sizeof buf, "img:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Schema ImageSetAugmenter::transformSchema(const Schema& in) const {
  requireColumn(in, getString("inputCol"), DType::Image);
  Schema out = in;
  const auto parity = getString("parityCol");
  if (in.has(parity)) throw Error(ErrorCode::InvalidParam, "column '" + parity + "' already exists");
  out = out.withColumn({parity, DType::Int64, nullptr});
  const auto origin = getString("originCol");
  if (in.has(origin)) {
    requireColumn(in, origin, DType::String);
  } else {
    out = out.withColumn({origin, DType::String, nullptr});
  }
  return out;
}

Dataset ImageSetAugmenter::transform(const Dataset& ds) const {
  Schema outSchema = transformSchema(ds.schema());
  const size_t imgCol = ds.schema().indexOf(getString("inputCol"));
  const std::optional<size_t> existing = ds.schema().find(getString("originCol"));
  PartitionFn fn = [=](const Rows& rows, TaskContext& ctx) {
    Rows out;
    out.reserve(rows.size() * 2);
    for (size_t i = 0; i < rows.size(); ++i) {
      const Cell& c = rows[i][imgCol];
      if (isNull(c)) {
        throw Error(ErrorCode::InvalidArgument, rowLabel(ctx, i, c) + ": null image");
      }
      const ImageRecord& img = asImage(c);
      if (!img.wellFormed()) throw Error(ErrorCode::InvalidArgument, rowLabel(ctx, i, c) + ": malformed image");
      Row original = appendCell(rows[i], int64_t{0});
      Row flipped = rows[i];
      flipped.values[imgCol] = flipHorizontal(img);
      flipped = appendCell(flipped, int64_t{1});
      if (!existing) {
        std::string id = imageOriginId(img);
        original = appendCell(original, id);
        flipped = appendCell(flipped, std::move(id));
      }
      out.push_back(std::move(original));
      out.push_back(std::move(flipped));
    }
    return out;
  };
  return ds.mapPartitions(std::move(fn), std::move(outSchema), "ImageSetAugmenter");
}

// ----------------------------------------------------------------- featurizer

const StageDescriptor& ImageFeaturizer::describe() {
  static const StageDescriptor d{
      "ImageFeaturizer",
      StageKind::Transformer,
      "Resizes and normalizes images, then evaluates a network on them.",
      {{"inputCol", ParamKind::Column, std::string("image"), "Image input column."},
       {"outputCol", ParamKind::Column, std::string("features"), "Appended FloatVector column."},
       {"modelPath", ParamKind::Path, std::nullopt, "Graph manifest or bundle file."},
       {"outputNode", ParamKind::String, std::string(""),
        "Node to read; empty selects the graph output."},
       {"resizeW", ParamKind::Int, int64_t{64}, "Width fed to the network."},
       {"resizeH", ParamKind::Int, int64_t{64}, "Height fed to the network."},
       {"miniBatchSize", ParamKind::Int, int64_t{64}, "Rows per evaluation batch."}}};
  return d;
}

ImageFeaturizer::ImageFeaturizer(ParamMap params) : StageImpl(describe(), std::move(params)) {
  finishConfigure();
}

std::string ImageFeaturizer::scratchColumn() const { return "__" + getString("outputCol") + "_input"; }

void ImageFeaturizer::validateParams() const {
  pre_.reset();
  net_.reset();
  const int64_t w = getInt("resizeW");
  const int64_t h = getInt("resizeH");
  if (w < 1 || h < 1) throw Error(ErrorCode::InvalidParam, "resize dimensions must be positive");
  if (!hasParam("modelPath")) return;
  auto net = std::make_shared<NetworkModel>(
      ParamMap{{"modelPath", getString("modelPath")},
               {"inputCol", scratchColumn()},
               {"outputCol", getString("outputCol")},
               {"outputNode", getString("outputNode")},
               {"miniBatchSize", getInt("miniBatchSize")}});
  const Shape& in = net->inputShape();
  if (in.size() != 3 || (in[2] != 1 && in[2] != 3)) {
    throw Error(ErrorCode::VectorSizeMismatch,
                "model input " + shapeString(in) + " is not an H,W,C image");
  }
  if (in[0] != h || in[1] != w) {
    throw Error(ErrorCode::VectorSizeMismatch,
                "resize " + std::to_string(w) + "x" + std::to_string(h) + " does not match model input " +
                    shapeString(in));
  }
  StringList ops;
  if (in[2] == 1) ops.push_back("grayscale");
  ops.push_back("resize:" + std::to_string(w) + ":" + std::to_string(h) + ":bilinear");
  ops.push_back(ImageOp::normalize().text());
  ops.push_back("toVector");
  pre_ = std::make_shared<ImageTransformer>(ParamMap{
      {"inputCol", getString("inputCol")}, {"outputCol", scratchColumn()}, {"ops", ops}});
  net_ = std::move(net);
}

const ImageTransformer& ImageFeaturizer::preprocessor() const {
  if (!pre_) throw Error(ErrorCode::InvalidParam, "ImageFeaturizer.modelPath is not set");
  return *pre_;
}

const NetworkModel& ImageFeaturizer::network() const {
  if (!net_) throw Error(ErrorCode::InvalidParam, "ImageFeaturizer.modelPath is not set");
  return *net_;
}

Schema ImageFeaturizer::transformSchema(const Schema& in) const {
  if (in.has(scratchColumn())) {
    throw Error(ErrorCode::InvalidParam, "column '" + scratchColumn() + "' is reserved");
  }
  Schema mid = preprocessor().transformSchema(in);
  return network().transformSchema(mid).drop({scratchColumn()});
}

Dataset ImageFeaturizer::transform(const Dataset& ds) const {
  transformSchema(ds.schema());
  return network().transform(preprocessor().transform(ds)).drop({scratchColumn()});
}

void registerImageStages(StageRegistry& registry) {
  registry.add(ImageTransformer::describe(), statelessFactory<ImageTransformer>());
  registry.add(ImageSetAugmenter::describe(), statelessFactory<ImageSetAugmenter>());
  registry.add(ImageFeaturizer::describe(), statelessFactory<ImageFeaturizer>());
}

}  // namespace tundra
