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

#include "tundra/graph/model_io.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "tundra/common/bytes.hpp"
#include "tundra/common/error.hpp"
#include "tundra/common/sha256.hpp"

namespace tundra {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMagic = "TGRAPH1";
constexpr std::string_view kBundleMagic = "TGBNDL1\n";

[[noreturn]] void parseError(size_t line, const std::string& why) {
  throw Error(ErrorCode::ParseError, "model manifest line " + std::to_string(line) + ": " + why);
}

int parseInt(std::string_view s, size_t line) {
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    parseError(line, "bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string> splitOn(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  size_t start = 0;
  for (;;) {
    size_t cut = s.find(sep, start);
    out.emplace_back(s.substr(start, cut - start));
    if (cut == std::string_view::npos) break;
    start = cut + 1;
  }
  return out;
}

Shape parseDims(std::string_view s, size_t line) {
  Shape out;
  for (const auto& part : splitOn(s, ',')) out.push_back(parseInt(part, line));
  if (out.empty()) parseError(line, "empty dims");
  return out;
}

std::string dimsText(const Shape& s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out;
}

std::string joined(const std::vector<std::string>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

std::vector<uint8_t> blockBytes(const WeightBlock& b) {
  std::vector<uint8_t> out;
  out.reserve(b.values.size() * 4);
  for (float f : b.values) putF32(out, f);
  return out;
}

std::vector<const WeightBlock*> usedBlocks(const ComputationGraph& g) {
  std::set<std::string> used;
  for (const auto& n : g.nodes()) used.insert(n.weights.begin(), n.weights.end());
  std::vector<const WeightBlock*> out;
  for (const auto& b : g.weights()->blocks()) {
    if (used.count(b.name)) out.push_back(&b);
  }
  return out;
}

}  // namespace

std::string graphManifest(const ComputationGraph& g, const std::string& blobName) {
  std::ostringstream out;
  out << kMagic << '\n';
  out << "weights " << blobName << '\n';
  out << "input " << g.inputName() << ' ' << dimsText(g.inputShape()) << '\n';
  out << "output " << g.outputName() << '\n';
  for (const WeightBlock* b : usedBlocks(g)) {
    out << "block " << b->name << ' ' << dimsText(b->dims) << ' ' << sha256Hex(blockBytes(*b))
        << '\n';
  }
  for (const auto& n : g.nodes()) {
    out << "node " << n.name << ' ' << opName(n.op);
    if (!n.inputs.empty()) out << " in=" << joined(n.inputs);
    switch (n.op) {
      case OpKind::Dense: out << " outUnits=" << n.outUnits; break;
      case OpKind::Conv2d:
        out << " kernelH=" << n.kernelH << " kernelW=" << n.kernelW
            << " outChannels=" << n.outChannels << " stride=" << n.stride << " padding=valid";
        break;
      case OpKind::MaxPool2d:
        out << " poolH=" << n.poolH << " poolW=" << n.poolW << " stride=" << n.stride;
        break;
      default: break;
    }
    if (!n.weights.empty()) out << " w=" << joined(n.weights);
    out << '\n';
  }
  return out.str();
}

std::vector<uint8_t> graphBlob(const ComputationGraph& g) {
  std::vector<uint8_t> out;
  for (const WeightBlock* b : usedBlocks(g)) {
    auto bytes = blockBytes(*b);
    out.insert(out.end(), bytes.begin(), bytes.end());
  }
  return out;
}

ComputationGraph parseGraph(std::string_view manifest, std::span<const uint8_t> blob) {
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : manifest) {
      if (c == '\n') {
        if (!cur.empty() && cur.back() == '\r') cur.pop_back();
        lines.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) lines.push_back(std::move(cur));
  }
  if (lines.empty() || lines[0] != kMagic) {
    throw Error(ErrorCode::BadMagic, "model manifest does not start with TGRAPH1");
  }

  std::string inputName, outputName;
  Shape inputShape;
  struct BlockDecl {
    std::string name;
    Shape dims;
    std::string sha;
  };
  std::vector<BlockDecl> blocks;
  std::vector<GraphNode> nodes;

  for (size_t li = 1; li < lines.size(); ++li) {
    const size_t lineNo = li + 1;
    std::istringstream in(lines[li]);
    std::string kw;
    if (!(in >> kw)) continue;
    if (kw == "weights") {
      std::string name;
      in >> name;
    } else if (kw == "input") {
      std::string dims;
      if (!(in >> inputName >> dims)) parseError(lineNo, "input needs a name and dims");
      inputShape = parseDims(dims, lineNo);
    } else if (kw == "output") {
      if (!(in >> outputName)) parseError(lineNo, "output needs a node name");
    } else if (kw == "block") {
      BlockDecl b;
      std::string dims;
      if (!(in >> b.name >> dims >> b.sha)) parseError(lineNo, "block needs name, dims, sha256");
      b.dims = parseDims(dims, lineNo);
      if (!isSha256Hex(b.sha)) parseError(lineNo, "block checksum is not sha256 hex");
      blocks.push_back(std::move(b));
    } else if (kw == "node") {
      GraphNode n;
      std::string op;
      if (!(in >> n.name >> op)) parseError(lineNo, "node needs a name and an op");
      n.op = parseOp(op);
      std::string attr;
      while (in >> attr) {
        auto eq = attr.find('=');
        if (eq == std::string::npos) parseError(lineNo, "attribute '" + attr + "' lacks '='");
        std::string key = attr.substr(0, eq);
        std::string value = attr.substr(eq + 1);
        if (key == "in") {
          n.inputs = splitOn(value, ',');
        } else if (key == "w") {
          n.weights = splitOn(value, ',');
        } else if (key == "padding") {
          if (value != "valid") {
            throw Error(ErrorCode::ShapeInconsistency,
                        "node '" + n.name + "': only valid padding is supported");
          }
        } else if (key == "outUnits") {
          n.outUnits = parseInt(value, lineNo);
        } else if (key == "kernelH") {
          n.kernelH = parseInt(value, lineNo);
        } else if (key == "kernelW") {
          n.kernelW = parseInt(value, lineNo);
        } else if (key == "outChannels") {
          n.outChannels = parseInt(value, lineNo);
        } else if (key == "poolH") {
          n.poolH = parseInt(value, lineNo);
        } else if (key == "poolW") {
          n.poolW = parseInt(value, lineNo);
        } else if (key == "stride") {
          n.stride = parseInt(value, lineNo);
        } else {
          parseError(lineNo, "unknown attribute '" + key + "'");
        }
      }
      nodes.push_back(std::move(n));
    } else {
      parseError(lineNo, "unknown directive '" + kw + "'");
    }
  }
  if (inputName.empty()) parseError(1, "missing input declaration");
  if (outputName.empty()) parseError(1, "missing output declaration");

  auto store = std::make_shared<WeightStore>();
  size_t offset = 0;
  for (const auto& b : blocks) {
    for (int d : b.dims) {
      if (d < 1) throw Error(ErrorCode::ShapeInconsistency, "block '" + b.name + "' has a zero dim");
    }
    const size_t bytes = static_cast<size_t>(shapeSize(b.dims)) * 4;
    if (offset + bytes > blob.size()) {
      throw Error(ErrorCode::ChecksumMismatch, "weight blob ends inside block '" + b.name + "'");
    }
    auto slice = blob.subspan(offset, bytes);
    if (sha256Hex(slice) != b.sha) {
      throw Error(ErrorCode::ChecksumMismatch, "weight block '" + b.name + "' fails its checksum");
    }
    WeightBlock wb{b.name, b.dims, {}};
    wb.values.resize(bytes / 4);
    for (size_t i = 0; i < wb.values.size(); ++i) wb.values[i] = getF32(slice, i * 4);
    store->add(std::move(wb));
    offset += bytes;
  }
  if (offset != blob.size()) {
    throw Error(ErrorCode::ChecksumMismatch, "weight blob has " +
                                                 std::to_string(blob.size() - offset) +
                                                 " trailing bytes");
  }
  return ComputationGraph(std::move(nodes), inputName, inputShape, outputName, std::move(store));
}

namespace {

fs::path blobPathFor(const fs::path& manifestPath, std::string_view manifest) {
  std::istringstream in{std::string(manifest)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("weights ", 0) == 0) {
      auto name = line.substr(8);
      if (!name.empty() && name.back() == '\r') name.pop_back();
      return manifestPath.parent_path() / name;
    }
  }
  throw Error(ErrorCode::ParseError, "model manifest lacks a weights line");
}

std::string readText(const fs::path& p) {
  auto bytes = readFileBytes(p);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace

void saveGraph(const ComputationGraph& g, const fs::path& manifestPath) {
  const std::string blobName = manifestPath.stem().string() + ".bin";
  if (manifestPath.has_parent_path()) fs::create_directories(manifestPath.parent_path());
  writeFileBytes(manifestPath.parent_path() / blobName, graphBlob(g));
  writeFileText(manifestPath, graphManifest(g, blobName));
}

ComputationGraph loadGraph(const fs::path& manifestPath) {
  auto manifest = readText(manifestPath);
  if (manifest.rfind(kMagic, 0) != 0) {
    throw Error(ErrorCode::BadMagic, manifestPath.string() + " is not a TGRAPH1 manifest");
  }
  auto blob = readFileBytes(blobPathFor(manifestPath, manifest));
  return parseGraph(manifest, blob);
}

namespace {

std::vector<uint8_t> pack(std::string_view manifest, std::span<const uint8_t> blob) {
  std::vector<uint8_t> out(kBundleMagic.begin(), kBundleMagic.end());
  putU64(out, manifest.size());
  out.insert(out.end(), manifest.begin(), manifest.end());
  putU64(out, blob.size());
  out.insert(out.end(), blob.begin(), blob.end());
  return out;
}

}  // namespace

std::vector<uint8_t> bundleGraphFiles(const fs::path& manifestPath) {
  auto manifest = readText(manifestPath);
  if (manifest.rfind(kMagic, 0) != 0) {
    throw Error(ErrorCode::BadMagic, manifestPath.string() + " is not a TGRAPH1 manifest");
  }
  auto blob = readFileBytes(blobPathFor(manifestPath, manifest));
  return pack(manifest, blob);
}

std::vector<uint8_t> bundleGraph(const ComputationGraph& g) {
  return pack(graphManifest(g, "bundle.bin"), graphBlob(g));
}

ComputationGraph unbundleGraph(std::span<const uint8_t> bundle) {
  if (bundle.size() < kBundleMagic.size() + 8 ||
      std::string_view(reinterpret_cast<const char*>(bundle.data()), kBundleMagic.size()) !=
          kBundleMagic) {
    throw Error(ErrorCode::BadMagic, "not a graph bundle");
  }
  size_t at = kBundleMagic.size();
  const uint64_t mlen = getU64(bundle, at);
  at += 8;
  if (mlen > bundle.size() - at || bundle.size() - at - mlen < 8) {
    throw Error(ErrorCode::ChecksumMismatch, "graph bundle is truncated");
  }
  std::string_view manifest(reinterpret_cast<const char*>(bundle.data() + at), mlen);
  at += mlen;
  const uint64_t blen = getU64(bundle, at);
  at += 8;
  if (blen != bundle.size() - at) throw Error(ErrorCode::ChecksumMismatch, "graph bundle is truncated");
  return parseGraph(manifest, bundle.subspan(at));
}

}  // namespace tundra
