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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tundra/dataframe/dataset.hpp"

namespace tundra {

// One image file of a corpus and its metadata.
struct CorpusEntry {
  std::filesystem::path path;
  std::string cameraId;
  std::optional<int64_t> timestamp;
  std::optional<int64_t> label;
};

// Lists `<root>/<cameraId>/<utcSeconds>_<label>.{pgm,ppm,bmp}` sorted by
// path. Rows of `<root>/meta.csv` (path,cameraId,timestamp,label; path
// relative to root) override what the file name says. Throws Io for a
// missing root and ParseError for an unreadable sidecar or a file whose
// camera cannot be determined.
std::vector<CorpusEntry> listCorpus(const std::filesystem::path& root);

// Columns: path String, image Image, cameraId String, timestamp Timestamp,
// label Int64. Unknown timestamps and labels are null. Files are decoded
// inside tasks.
Schema imageCorpusSchema();
Dataset readImages(std::shared_ptr<Engine> engine, const std::filesystem::path& root,
                   std::optional<int> numPartitions = std::nullopt);

}  // namespace tundra
