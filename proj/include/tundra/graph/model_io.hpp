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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tundra/graph/graph.hpp"

namespace tundra {

// Model files come in pairs. The manifest is line oriented:
//
//   TGRAPH1
//   weights <blob file name>
//   input <node> <d0,d1,...>
//   output <node>
//   block <name> <d0,d1,...> <sha256 of the block bytes>
//   node <name> <op> [in=a,b] [key=value ...] [w=kernel,bias]
//
// The blob holds the blocks as little-endian f32, row-major, concatenated in
// manifest order. Only blocks referenced by nodes are written.

std::string graphManifest(const ComputationGraph& g, const std::string& blobName);
std::vector<uint8_t> graphBlob(const ComputationGraph& g);

// Throws BadMagic, ChecksumMismatch, ShapeInconsistency, UnknownOp,
// UnknownNode or ParseError.
ComputationGraph parseGraph(std::string_view manifest, std::span<const uint8_t> blob);

// Writes `<manifestPath>` and the blob next to it (`<stem>.bin`).
void saveGraph(const ComputationGraph& g, const std::filesystem::path& manifestPath);
ComputationGraph loadGraph(const std::filesystem::path& manifestPath);

// Manifest and blob packed into one buffer for broadcast. Built from the
// files as stored, so checksums are verified again when unpacked.
std::vector<uint8_t> bundleGraphFiles(const std::filesystem::path& manifestPath);
std::vector<uint8_t> bundleGraph(const ComputationGraph& g);
ComputationGraph unbundleGraph(std::span<const uint8_t> bundle);

}  // namespace tundra
