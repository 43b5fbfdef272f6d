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
#include <string_view>
#include <vector>

#include "tundra/dataframe/value.hpp"

namespace tundra {

enum class ImageFormat { Pgm, Ppm, Bmp };

// "pgm", "ppm" or "bmp"; also accepts file extensions with a leading dot.
// Throws UnsupportedFormat.
ImageFormat parseImageFormat(std::string_view name);
ImageFormat formatForPath(const std::filesystem::path& path);

// Binary PGM (P5), binary PPM (P6) and uncompressed 24-bit BMP. Without a
// hint the format is sniffed from the magic bytes. Throws UnsupportedFormat,
// MalformedHeader or TruncatedData.
ImageRecord decodeImage(std::span<const uint8_t> bytes,
                        std::optional<ImageFormat> hint = std::nullopt);
// PGM takes GRAY8 images; PPM and BMP take RGB8. Throws UnsupportedFormat.
std::vector<uint8_t> encodeImage(const ImageRecord& img, ImageFormat format);

ImageRecord readImageFile(const std::filesystem::path& path);
void writeImageFile(const ImageRecord& img, const std::filesystem::path& path);

}  // namespace tundra
