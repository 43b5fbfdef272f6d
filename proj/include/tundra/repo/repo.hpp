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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tundra {

struct ManifestEntry {
  std::string name;
  // file://, http:// or https://; anything else is a path relative to the
  // manifest's directory.
  std::string uri;
  std::string sha256;
  int64_t sizeBytes = 0;

  bool operator==(const ManifestEntry&) const = default;
};

// One `name\turi\tsha256\tsizeBytes` entry per line; blank lines and lines
// starting with '#' are skipped. Sorted by name. Throws MalformedManifest.
std::vector<ManifestEntry> parseManifest(std::string_view text);
std::vector<ManifestEntry> readManifest(const std::filesystem::path& path);
std::string formatManifest(const std::vector<ManifestEntry>& entries);

// Streams the file. False when it is missing or the digest differs.
bool verifyFile(const std::filesystem::path& path, std::string_view sha256);

// TUNDRA_CACHE when set, else $HOME/.cache/tundra, else ./.tundra-cache.
std::filesystem::path defaultCacheDir();

struct FetchResult {
  std::filesystem::path path;
  // Reads of the artifact's source performed by this call.
  int sourceReads = 0;
  bool cacheHit = false;
  // A corrupt cache entry was quarantined and fetched again.
  bool repaired = false;
};

struct RepoOptions {
  // Retries after the first failed HTTP attempt, with these waits.
  std::vector<std::chrono::milliseconds> backoff = {std::chrono::milliseconds(250),
                                                     std::chrono::milliseconds(1000)};
  std::chrono::seconds httpTimeout{30};
};

class ModelRepo {
 public:
  // An empty `cacheDir` means defaultCacheDir().
  ModelRepo(std::filesystem::path manifestPath, std::filesystem::path cacheDir = {},
            RepoOptions options = {});

  const std::vector<ManifestEntry>& entries() const { return entries_; }
  // Throws UnknownModel.
  const ManifestEntry& entry(std::string_view name) const;
  std::filesystem::path cachePath(std::string_view name) const;

  // Throws UnknownModel, SourceUnavailable, or ChecksumMismatch when the
  // source itself does not match the manifest.
  FetchResult fetch(std::string_view name);

  // Re-hashes the cached copy. Throws ChecksumMismatch when it is corrupt and
  // Io when it is absent.
  void checkCached(std::string_view name) const;

  int64_t totalSourceReads() const { return sourceReads_.load(); }

 private:
  std::vector<uint8_t> readSource(const ManifestEntry& e);
  std::vector<uint8_t> readHttp(const std::string& uri);

  std::filesystem::path manifestPath_;
  std::filesystem::path cacheDir_;
  RepoOptions options_;
  std::vector<ManifestEntry> entries_;
  std::atomic<int64_t> sourceReads_{0};
};

}  // namespace tundra
