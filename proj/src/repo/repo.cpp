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

#include "tundra/repo/repo.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "tundra/common/bytes.hpp"
#include "tundra/common/error.hpp"
#include "tundra/common/sha256.hpp"

namespace tundra {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> splitTabs(const std::string& line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == '\t') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

[[noreturn]] void malformed(size_t line, const std::string& why) {
  throw Error(ErrorCode::MalformedManifest, "manifest line " + std::to_string(line) + ": " + why);
}

class FileLock {
 public:
  explicit FileLock(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::Io, "cannot open lock " + path.string());
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw Error(ErrorCode::Io, "cannot lock " + path.string());
      }
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

bool startsWith(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

bool matches(const ManifestEntry& e, const fs::path& path) {
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec || static_cast<int64_t>(size) != e.sizeBytes) return false;
  return verifyFile(path, e.sha256);
}

}  // namespace

std::vector<ManifestEntry> parseManifest(std::string_view text) {
  std::vector<ManifestEntry> out;
  std::set<std::string> names;
  std::istringstream in{std::string(text)};
  std::string line;
  size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto f = splitTabs(line);
    if (f.size() != 4) malformed(lineNo, "expected 4 tab-separated fields");
    ManifestEntry e;
    e.name = f[0];
    e.uri = f[1];
    e.sha256 = f[2];
    if (e.name.empty() || e.name.find('/') != std::string::npos || e.name == "." || e.name == "..") {
      malformed(lineNo, "bad name '" + e.name + "'");
    }
    if (e.uri.empty()) malformed(lineNo, "empty uri");
    if (!isSha256Hex(e.sha256)) malformed(lineNo, "sha256 must be 64 lowercase hex characters");
    try {
      size_t used = 0;
      e.sizeBytes = std::stoll(f[3], &used);
      if (used != f[3].size() || e.sizeBytes < 0) throw std::invalid_argument("size");
    } catch (const std::exception&) {
      malformed(lineNo, "bad size '" + f[3] + "'");
    }
    if (!names.insert(e.name).second) malformed(lineNo, "duplicate name '" + e.name + "'");
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.name < b.name; });
  return out;
}

std::vector<ManifestEntry> readManifest(const fs::path& path) {
  const auto bytes = readFileBytes(path);
  return parseManifest(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string formatManifest(const std::vector<ManifestEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += e.name + "\t" + e.uri + "\t" + e.sha256 + "\t" + std::to_string(e.sizeBytes) + "\n";
  }
  return out;
}

bool verifyFile(const fs::path& path, std::string_view sha256) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) return false;
  return sha256File(path) == sha256;
}

fs::path defaultCacheDir() {
  if (const char* env = std::getenv("TUNDRA_CACHE"); env && *env) return env;
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "tundra";
  return ".tundra-cache";
}

ModelRepo::ModelRepo(fs::path manifestPath, fs::path cacheDir, RepoOptions options)
    : manifestPath_(std::move(manifestPath)),
      cacheDir_(cacheDir.empty() ? defaultCacheDir() : std::move(cacheDir)),
      options_(std::move(options)),
      entries_(readManifest(manifestPath_)) {}

const ManifestEntry& ModelRepo::entry(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e;
  }
  throw Error(ErrorCode::UnknownModel, "no model named '" + std::string(name) + "' in " +
                                           manifestPath_.string());
}

fs::path ModelRepo::cachePath(std::string_view name) const {
  const auto& e = entry(name);
  return cacheDir_ / e.sha256.substr(0, 16) / e.name;
}

void ModelRepo::checkCached(std::string_view name) const {
  const auto& e = entry(name);
  const fs::path path = cachePath(name);
  if (!fs::exists(path)) throw Error(ErrorCode::Io, "no cached copy of '" + e.name + "'");
  if (!matches(e, path)) {
    throw Error(ErrorCode::ChecksumMismatch, "cached copy of '" + e.name + "' is corrupt");
  }
}

FetchResult ModelRepo::fetch(std::string_view name) {
  const ManifestEntry& e = entry(name);
  const fs::path path = cachePath(name);
  fs::create_directories(path.parent_path());
  FileLock lock(path.parent_path() / ("." + e.name + ".lock"));

  FetchResult res;
  res.path = path;
  if (fs::exists(path)) {
    if (matches(e, path)) {
      res.cacheHit = true;
      return res;
    }
    fs::rename(path, path.parent_path() / (e.name + ".corrupt"));
    res.repaired = true;
  }

  const auto bytes = readSource(e);
  ++res.sourceReads;
  if (static_cast<int64_t>(bytes.size()) != e.sizeBytes || sha256Hex(bytes) != e.sha256) {
    throw Error(ErrorCode::ChecksumMismatch,
                "source of '" + e.name + "' does not match the manifest (" + e.uri + ")");
  }
  const fs::path partial = path.parent_path() / (e.name + ".partial");
  writeFileBytes(partial, bytes);
  fs::rename(partial, path);
  return res;
}

std::vector<uint8_t> ModelRepo::readSource(const ManifestEntry& e) {
  ++sourceReads_;
  if (startsWith(e.uri, "http://") || startsWith(e.uri, "https://")) return readHttp(e.uri);
  fs::path p = startsWith(e.uri, "file://") ? fs::path(e.uri.substr(7)) : fs::path(e.uri);
  if (p.is_relative()) p = manifestPath_.parent_path() / p;
  try {
    return readFileBytes(p);
  } catch (const Error& err) {
    throw Error(ErrorCode::SourceUnavailable, "cannot read " + e.uri + ": " + err.what());
  }
}

std::vector<uint8_t> ModelRepo::readHttp(const std::string& uri) {
  const size_t schemeEnd = uri.find("://") + 3;
  const size_t pathStart = uri.find('/', schemeEnd);
  const std::string origin = uri.substr(0, pathStart);
  const std::string target = pathStart == std::string::npos ? "/" : uri.substr(pathStart);
  std::string lastError;
  for (size_t attempt = 0;; ++attempt) {
    httplib::Client client(origin);
    client.set_connection_timeout(options_.httpTimeout);
    client.set_read_timeout(options_.httpTimeout);
    client.set_follow_location(true);
    if (auto r = client.Get(target)) {
      if (r->status == 200) return std::vector<uint8_t>(r->body.begin(), r->body.end());
      lastError = "HTTP " + std::to_string(r->status);
    } else {
      lastError = httplib::to_string(r.error());
    }
    if (attempt >= options_.backoff.size()) break;
    std::this_thread::sleep_for(options_.backoff[attempt]);
  }
  throw Error(ErrorCode::SourceUnavailable, "GET " + uri + " failed: " + lastError);
}

}  // namespace tundra
