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

#include "tundra/image/reader.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

#include "tundra/image/codec.hpp"

namespace tundra {

namespace std_fs = std::filesystem;

namespace {

std::optional<int64_t> parseInt(std::string_view s) {
  int64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  return v;
}

bool isImageFile(const std_fs::path& p) {
  try {
    formatForPath(p);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::vector<std::string> splitCsvLine(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

std::map<std::string, CorpusEntry> readSidecar(const std_fs::path& root) {
  std::map<std::string, CorpusEntry> out;
  const auto file = root / "meta.csv";
  if (!std_fs::exists(file)) return out;
  std::ifstream in(file);
  std::string line;
  int lineNo = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::ParseError, "meta.csv line " + std::to_string(lineNo) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty() || line == "\r") continue;
    auto f = splitCsvLine(line);
    if (lineNo == 1 && !f.empty() && f[0] == "path") continue;
    if (f.size() != 4) fail("expected 4 fields");
    CorpusEntry e;
    e.path = root / f[0];
    e.cameraId = f[1];
    if (e.cameraId.empty()) fail("empty cameraId");
    if (!f[2].empty()) {
      e.timestamp = parseInt(f[2]);
      if (!e.timestamp) fail("bad timestamp '" + f[2] + "'");
    }
    if (!f[3].empty()) {
      e.label = parseInt(f[3]);
      if (!e.label) fail("bad label '" + f[3] + "'");
    }
    out[e.path.lexically_normal().string()] = std::move(e);
  }
  return out;
}

}  // namespace

std::vector<CorpusEntry> listCorpus(const std_fs::path& root) {
  if (!std_fs::is_directory(root)) throw Error(ErrorCode::Io, "not a directory: " + root.string());
  auto sidecar = readSidecar(root);
  std::vector<CorpusEntry> out;
  for (const auto& item : std_fs::recursive_directory_iterator(root)) {
    if (!item.is_regular_file() || !isImageFile(item.path())) continue;
    const std::string key = item.path().lexically_normal().string();
    if (auto it = sidecar.find(key); it != sidecar.end()) {
      out.push_back(it->second);
      continue;
    }
    CorpusEntry e;
    e.path = item.path();
    const auto rel = std_fs::relative(item.path(), root);
    if (std::distance(rel.begin(), rel.end()) < 2) {
      throw Error(ErrorCode::ParseError, "no camera directory for " + item.path().string());
    }
    e.cameraId = rel.begin()->string();
    const std::string stem = item.path().stem().string();
    if (auto us = stem.find('_'); us != std::string::npos) {
      e.timestamp = parseInt(std::string_view(stem).substr(0, us));
      e.label = parseInt(std::string_view(stem).substr(us + 1));
    } else {
      e.timestamp = parseInt(stem);
    }
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) { return a.path < b.path; });
  return out;
}

Schema imageCorpusSchema() {
  return Schema{{"path", DType::String},
                {"image", DType::Image},
                {"cameraId", DType::String},
                {"timestamp", DType::Timestamp},
                {"label", DType::Int64}};
}

Dataset readImages(std::shared_ptr<Engine> engine, const std_fs::path& root,
                   std::optional<int> numPartitions) {
  auto entries = std::make_shared<const std::vector<CorpusEntry>>(listCorpus(root));
  int n = numPartitions.value_or(
      std::max(1, std::min<int>(engine->defaultParallelism(), static_cast<int>(entries->size()))));
  SourceFn gen = [entries, n](int partition, TaskContext&) {
    Rows rows;
    for (size_t i = static_cast<size_t>(partition); i < entries->size(); i += static_cast<size_t>(n)) {
      const CorpusEntry& e = (*entries)[i];
      Row r;
      r.values.reserve(5);
      r.values.emplace_back(e.path.string());
      r.values.emplace_back(readImageFile(e.path));
      r.values.emplace_back(e.cameraId);
      r.values.push_back(e.timestamp ? Cell(Timestamp{*e.timestamp}) : Cell(Null{}));
      r.values.push_back(e.label ? Cell(*e.label) : Cell(Null{}));
      rows.push_back(std::move(r));
    }
    return rows;
  };
  return Dataset::fromGenerator(std::move(engine), imageCorpusSchema(), n, std::move(gen),
                                "readImages");
}

}  // namespace tundra
