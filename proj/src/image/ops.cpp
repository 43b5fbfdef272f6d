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

#include "tundra/image/ops.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "tundra/common/bytes.hpp"
#include "tundra/common/error.hpp"

namespace tundra {

namespace {

std::vector<std::string_view> splitColon(std::string_view s) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (;;) {
    size_t p = s.find(':', start);
    out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

int parseDim(std::string_view t, std::string_view op) {
  int v = 0;
  auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || end != t.data() + t.size() || v < 1) {
    throw Error(ErrorCode::InvalidChain, "bad dimension '" + std::string(t) + "' in " + std::string(op));
  }
  return v;
}

double parseReal(std::string_view t, std::string_view op) {
  std::string s(t);
  size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidChain, "bad number '" + s + "' in " + std::string(op));
  }
  return v;
}

// Rounds a non-negative sample to a byte, ties away from zero.
uint8_t toByte(double v) {
  double r = std::floor(v + 0.5);
  return static_cast<uint8_t>(std::clamp(r, 0.0, 255.0));
}

ImageRecord resizeNearest(const ImageRecord& img, int w, int h) {
  ImageRecord out(w, h, img.mode, img.path);
  for (int y = 0; y < h; ++y) {
    const int sy = static_cast<int>((2LL * y + 1) * img.height / (2LL * h));
    for (int x = 0; x < w; ++x) {
      const int sx = static_cast<int>((2LL * x + 1) * img.width / (2LL * w));
      for (int c = 0; c < img.channels; ++c) out.at(x, y, c) = img.at(sx, sy, c);
    }
  }
  return out;
}

struct Tap {
  int i0, i1;
  double f;
};

std::vector<Tap> bilinearTaps(int src, int dst) {
  std::vector<Tap> taps(static_cast<size_t>(dst));
  const double scale = static_cast<double>(src) / dst;
  for (int d = 0; d < dst; ++d) {
    double s = (d + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const int i0 = static_cast<int>(std::floor(s));
    taps[d] = {i0, std::min(i0 + 1, src - 1), s - i0};
  }
  return taps;
}

ImageRecord resizeBilinear(const ImageRecord& img, int w, int h) {
  ImageRecord out(w, h, img.mode, img.path);
  const auto tx = bilinearTaps(img.width, w);
  const auto ty = bilinearTaps(img.height, h);
  for (int y = 0; y < h; ++y) {
    const Tap& a = ty[y];
    for (int x = 0; x < w; ++x) {
      const Tap& b = tx[x];
      for (int c = 0; c < img.channels; ++c) {
        const double top = (1.0 - b.f) * img.at(b.i0, a.i0, c) + b.f * img.at(b.i1, a.i0, c);
        const double bot = (1.0 - b.f) * img.at(b.i0, a.i1, c) + b.f * img.at(b.i1, a.i1, c);
        out.at(x, y, c) = toByte((1.0 - a.f) * top + a.f * bot);
      }
    }
  }
  return out;
}

ImageRecord cropCenter(const ImageRecord& img, int w, int h) {
  if (w > img.width || h > img.height) {
    throw Error(ErrorCode::CropOutOfBounds, "crop " + std::to_string(w) + "x" + std::to_string(h) +
                                                " exceeds image " + std::to_string(img.width) + "x" +
                                                std::to_string(img.height));
  }
  const int x0 = (img.width - w) / 2;
  const int y0 = (img.height - h) / 2;
  ImageRecord out(w, h, img.mode, img.path);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < img.channels; ++c) out.at(x, y, c) = img.at(x0 + x, y0 + y, c);
    }
  }
  return out;
}

ImageRecord toGray(const ImageRecord& img) {
  if (img.mode == ImageMode::Gray8) return img;
  ImageRecord out(img.width, img.height, ImageMode::Gray8, img.path);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      out.at(x, y) = luma(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
    }
  }
  return out;
}

void requireWellFormed(const ImageRecord& img) {
  if (!img.wellFormed()) {
    throw Error(ErrorCode::InvalidArgument,
                "malformed image: " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                    " with " + std::to_string(img.data.size()) + " bytes");
  }
}

// Pending selection over a materialized base image: output pixel (x, y) reads
// base(xmap[x], ymap[y]), optionally reduced to luma.
struct Selection {
  const ImageRecord* base = nullptr;
  std::vector<int> xmap, ymap;
  bool gray = false;

  void reset(const ImageRecord& img) {
    base = &img;
    xmap.resize(static_cast<size_t>(img.width));
    ymap.resize(static_cast<size_t>(img.height));
    std::iota(xmap.begin(), xmap.end(), 0);
    std::iota(ymap.begin(), ymap.end(), 0);
    gray = false;
  }
  int width() const { return static_cast<int>(xmap.size()); }
  int height() const { return static_cast<int>(ymap.size()); }
  ImageMode mode() const { return gray ? ImageMode::Gray8 : base->mode; }
  bool identity() const {
    if (gray && base->mode != ImageMode::Gray8) return false;
    if (width() != base->width || height() != base->height) return false;
    for (int i = 0; i < width(); ++i) if (xmap[i] != i) return false;
    for (int i = 0; i < height(); ++i) if (ymap[i] != i) return false;
    return true;
  }

  // Calls emit(c, value) for every output sample in storage order.
  template <class Emit>
  void scan(Emit&& emit) const {
    const ImageRecord& b = *base;
    const bool reduce = gray && b.mode == ImageMode::Rgb8;
    for (int y : ymap) {
      const uint8_t* row = b.data.data() + static_cast<size_t>(y) * b.width * b.channels;
      for (int x : xmap) {
        const uint8_t* px = row + static_cast<size_t>(x) * b.channels;
        if (reduce) {
          emit(luma(px[0], px[1], px[2]));
        } else {
          for (int c = 0; c < b.channels; ++c) emit(px[c]);
        }
      }
    }
  }

  ImageRecord materialize() const {
    if (identity()) return *base;
    ImageRecord out(width(), height(), mode(), base->path);
    uint8_t* dst = out.data.data();
    scan([&](uint8_t v) { *dst++ = v; });
    return out;
  }
};

}  // namespace

uint8_t luma(uint8_t r, uint8_t g, uint8_t b) {
  return static_cast<uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

ImageOp ImageOp::resize(int w, int h, ResizeMethod m) {
  if (w < 1 || h < 1) throw Error(ErrorCode::InvalidChain, "resize dimensions must be positive");
  ImageOp op;
  op.kind = ImageOpKind::Resize;
  op.width = w;
  op.height = h;
  op.method = m;
  return op;
}
ImageOp ImageOp::flipHorizontal() { return ImageOp{}; }
ImageOp ImageOp::grayscale() {
  ImageOp op;
  op.kind = ImageOpKind::Grayscale;
  return op;
}
ImageOp ImageOp::cropCenter(int w, int h) {
  if (w < 1 || h < 1) throw Error(ErrorCode::InvalidChain, "crop dimensions must be positive");
  ImageOp op;
  op.kind = ImageOpKind::CropCenter;
  op.width = w;
  op.height = h;
  return op;
}
ImageOp ImageOp::normalize(double scale, double offset) {
  if (!std::isfinite(scale) || !std::isfinite(offset)) {
    throw Error(ErrorCode::InvalidChain, "normalize parameters must be finite");
  }
  ImageOp op;
  op.kind = ImageOpKind::Normalize;
  op.scale = scale;
  op.offset = offset;
  return op;
}
ImageOp ImageOp::toVector() {
  ImageOp op;
  op.kind = ImageOpKind::ToVector;
  return op;
}

ImageOp ImageOp::parse(std::string_view text) {
  const auto parts = splitColon(text);
  const std::string_view name = parts[0];
  auto arity = [&](size_t lo, size_t hi) {
    if (parts.size() - 1 < lo || parts.size() - 1 > hi) {
      throw Error(ErrorCode::InvalidChain, "wrong argument count in '" + std::string(text) + "'");
    }
  };
  if (name == "resize") {
    arity(2, 3);
    ResizeMethod m = ResizeMethod::Bilinear;
    if (parts.size() == 4) {
      if (parts[3] == "nearest") {
        m = ResizeMethod::Nearest;
      } else if (parts[3] != "bilinear") {
        throw Error(ErrorCode::InvalidChain, "unknown resize method '" + std::string(parts[3]) + "'");
      }
    }
    return resize(parseDim(parts[1], text), parseDim(parts[2], text), m);
  }
  if (name == "cropCenter") {
    arity(2, 2);
    return cropCenter(parseDim(parts[1], text), parseDim(parts[2], text));
  }
  if (name == "normalize") {
    if (parts.size() == 1) return normalize();
    arity(2, 2);
    return normalize(parseReal(parts[1], text), parseReal(parts[2], text));
  }
  arity(0, 0);
  if (name == "flipHorizontal") return flipHorizontal();
  if (name == "grayscale") return grayscale();
  if (name == "toVector") return toVector();
  throw Error(ErrorCode::InvalidChain, "unknown image op '" + std::string(text) + "'");
}

std::string ImageOp::text() const {
  const std::string dims = std::to_string(width) + ":" + std::to_string(height);
  switch (kind) {
    case ImageOpKind::Resize:
      return "resize:" + dims + (method == ResizeMethod::Nearest ? ":nearest" : ":bilinear");
    case ImageOpKind::FlipHorizontal: return "flipHorizontal";
    case ImageOpKind::Grayscale: return "grayscale";
    case ImageOpKind::CropCenter: return "cropCenter:" + dims;
    case ImageOpKind::Normalize: return "normalize:" + formatDouble(scale) + ":" + formatDouble(offset);
    case ImageOpKind::ToVector: return "toVector";
  }
  return "?";
}

ImageOpChain::ImageOpChain(std::vector<ImageOp> ops) : ops_(std::move(ops)) {
  for (size_t i = 0; i < ops_.size(); ++i) {
    const bool last = i + 1 == ops_.size();
    if (ops_[i].kind == ImageOpKind::ToVector && !last) {
      throw Error(ErrorCode::InvalidChain, "toVector must be the last op");
    }
    if (ops_[i].kind == ImageOpKind::Normalize &&
        (last || ops_[i + 1].kind != ImageOpKind::ToVector)) {
      throw Error(ErrorCode::InvalidChain, "normalize must be immediately followed by toVector");
    }
  }
}

ImageOpChain ImageOpChain::parse(const std::vector<std::string>& ops) {
  std::vector<ImageOp> parsed;
  parsed.reserve(ops.size());
  for (const auto& s : ops) parsed.push_back(ImageOp::parse(s));
  return ImageOpChain(std::move(parsed));
}

std::vector<std::string> ImageOpChain::text() const {
  std::vector<std::string> out;
  for (const auto& op : ops_) out.push_back(op.text());
  return out;
}

ImageOpChain::OutputShape ImageOpChain::outputShape(int width, int height, ImageMode mode) const {
  OutputShape s{width, height, mode};
  for (const auto& op : ops_) {
    switch (op.kind) {
      case ImageOpKind::Resize:
        s.width = op.width;
        s.height = op.height;
        break;
      case ImageOpKind::CropCenter:
        if (op.width > s.width || op.height > s.height) {
          throw Error(ErrorCode::CropOutOfBounds, "crop exceeds image");
        }
        s.width = op.width;
        s.height = op.height;
        break;
      case ImageOpKind::Grayscale: s.mode = ImageMode::Gray8; break;
      default: break;
    }
  }
  return s;
}

ImageRecord flipHorizontal(const ImageRecord& img) {
  ImageRecord out(img.width, img.height, img.mode, img.path);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) out.at(x, y, c) = img.at(img.width - 1 - x, y, c);
    }
  }
  return out;
}

ImageRecord applyOp(const ImageRecord& img, const ImageOp& op) {
  requireWellFormed(img);
  switch (op.kind) {
    case ImageOpKind::Resize:
      return op.method == ResizeMethod::Nearest ? resizeNearest(img, op.width, op.height)
                                                : resizeBilinear(img, op.width, op.height);
    case ImageOpKind::FlipHorizontal: return flipHorizontal(img);
    case ImageOpKind::Grayscale: return toGray(img);
    case ImageOpKind::CropCenter: return cropCenter(img, op.width, op.height);
    default: break;
  }
  throw Error(ErrorCode::InvalidChain, op.text() + " does not produce an image");
}

ChainOutput applyChainSequential(const ImageRecord& img, const ImageOpChain& chain) {
  requireWellFormed(img);
  ImageRecord cur = img;
  std::vector<float> values;
  bool normalized = false;
  for (const auto& op : chain.ops()) {
    if (op.kind == ImageOpKind::Normalize) {
      values.resize(cur.data.size());
      for (size_t i = 0; i < values.size(); ++i) {
        values[i] = static_cast<float>(static_cast<double>(cur.data[i]) * op.scale + op.offset);
      }
      normalized = true;
    } else if (op.kind == ImageOpKind::ToVector) {
      if (!normalized) {
        const ImageOp dflt = ImageOp::normalize();
        values.resize(cur.data.size());
        for (size_t i = 0; i < values.size(); ++i) {
          values[i] = static_cast<float>(static_cast<double>(cur.data[i]) * dflt.scale + dflt.offset);
        }
      }
      return values;
    } else {
      cur = applyOp(cur, op);
    }
  }
  return cur;
}

ChainOutput applyChain(const ImageRecord& img, const ImageOpChain& chain) {
  requireWellFormed(img);
  ImageRecord stage;  // last materialization point
  Selection sel;
  sel.reset(img);
  double scale = 1.0 / 255.0;
  double offset = 0.0;
  for (const auto& op : chain.ops()) {
    switch (op.kind) {
      case ImageOpKind::FlipHorizontal:
        std::reverse(sel.xmap.begin(), sel.xmap.end());
        break;
      case ImageOpKind::Grayscale:
        sel.gray = true;
        break;
      case ImageOpKind::CropCenter: {
        if (op.width > sel.width() || op.height > sel.height()) {
          throw Error(ErrorCode::CropOutOfBounds,
                      "crop " + std::to_string(op.width) + "x" + std::to_string(op.height) +
                          " exceeds image " + std::to_string(sel.width()) + "x" +
                          std::to_string(sel.height()));
        }
        const int x0 = (sel.width() - op.width) / 2;
        const int y0 = (sel.height() - op.height) / 2;
        sel.xmap = std::vector<int>(sel.xmap.begin() + x0, sel.xmap.begin() + x0 + op.width);
        sel.ymap = std::vector<int>(sel.ymap.begin() + y0, sel.ymap.begin() + y0 + op.height);
        break;
      }
      case ImageOpKind::Resize:
        if (op.method == ResizeMethod::Nearest) {
          auto remap = [](const std::vector<int>& m, int n) {
            std::vector<int> out(static_cast<size_t>(n));
            const auto src = static_cast<long long>(m.size());
            for (int i = 0; i < n; ++i) out[i] = m[static_cast<size_t>((2LL * i + 1) * src / (2LL * n))];
            return out;
          };
          sel.xmap = remap(sel.xmap, op.width);
          sel.ymap = remap(sel.ymap, op.height);
        } else {
          stage = resizeBilinear(sel.materialize(), op.width, op.height);
          sel.reset(stage);
        }
        break;
      case ImageOpKind::Normalize:
        scale = op.scale;
        offset = op.offset;
        break;
      case ImageOpKind::ToVector: {
        FloatVector out;
        out.reserve(static_cast<size_t>(sel.width()) * sel.height() * channelsFor(sel.mode()));
        sel.scan([&](uint8_t v) {
          out.push_back(static_cast<float>(static_cast<double>(v) * scale + offset));
        });
        return out;
      }
    }
  }
  return sel.materialize();
}

}  // namespace tundra
