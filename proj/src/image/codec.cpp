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

#include "tundra/image/codec.hpp"

#include <cctype>
#include <string>

#include "tundra/common/bytes.hpp"
#include "tundra/common/error.hpp"

namespace tundra {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const uint8_t> b) : b_(b) {}

  // Next whitespace-separated token; skips '#' comments.
  std::string token() {
    for (;;) {
      while (pos_ < b_.size() && std::isspace(b_[pos_])) ++pos_;
      if (pos_ < b_.size() && b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
    std::string t;
    while (pos_ < b_.size() && !std::isspace(b_[pos_]) && b_[pos_] != '#') {
      t += static_cast<char>(b_[pos_++]);
    }
    return t;
  }

  int number(const char* what) {
    auto t = token();
    if (t.empty() || t.size() > 9) throw Error(ErrorCode::MalformedHeader, std::string("bad ") + what);
    for (char c : t) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw Error(ErrorCode::MalformedHeader, std::string("bad ") + what + " '" + t + "'");
      }
    }
    return std::stoi(t);
  }

  // Exactly one whitespace byte separates the header from the raster.
  size_t rasterStart() {
    if (pos_ >= b_.size() || !std::isspace(b_[pos_])) {
      throw Error(ErrorCode::MalformedHeader, "header not terminated by whitespace");
    }
    return pos_ + 1;
  }

 private:
  std::span<const uint8_t> b_;
  size_t pos_ = 0;
};

ImageRecord decodePnm(std::span<const uint8_t> bytes, ImageMode mode) {
  HeaderReader r(bytes);
  const std::string magic = r.token();
  if (magic != (mode == ImageMode::Gray8 ? "P5" : "P6")) {
    throw Error(ErrorCode::MalformedHeader, "unexpected magic '" + magic + "'");
  }
  const int w = r.number("width");
  const int h = r.number("height");
  const int maxval = r.number("maxval");
  if (w < 1 || h < 1) throw Error(ErrorCode::MalformedHeader, "zero image dimension");
  if (maxval < 1 || maxval > 255) {
    throw Error(ErrorCode::UnsupportedFormat, "only 8-bit rasters are supported");
  }
  const size_t start = r.rasterStart();
  ImageRecord img(w, h, mode);
  const size_t need = img.data.size();
  if (bytes.size() - std::min(bytes.size(), start) < need) {
    throw Error(ErrorCode::TruncatedData, "raster needs " + std::to_string(need) + " bytes, found " +
                                              std::to_string(bytes.size() - std::min(bytes.size(), start)));
  }
  std::copy(bytes.begin() + static_cast<std::ptrdiff_t>(start),
            bytes.begin() + static_cast<std::ptrdiff_t>(start + need), img.data.begin());
  return img;
}

uint32_t le32(std::span<const uint8_t> b, size_t at) {
  return static_cast<uint32_t>(b[at]) | static_cast<uint32_t>(b[at + 1]) << 8 |
         static_cast<uint32_t>(b[at + 2]) << 16 | static_cast<uint32_t>(b[at + 3]) << 24;
}
uint16_t le16(std::span<const uint8_t> b, size_t at) {
  return static_cast<uint16_t>(b[at] | b[at + 1] << 8);
}
void put32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
void put16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

ImageRecord decodeBmp(std::span<const uint8_t> b) {
  if (b.size() < 54) throw Error(ErrorCode::MalformedHeader, "BMP header is truncated");
  if (b[0] != 'B' || b[1] != 'M') throw Error(ErrorCode::MalformedHeader, "missing BM signature");
  const uint32_t offset = le32(b, 10);
  const uint32_t infoSize = le32(b, 14);
  if (infoSize < 40) throw Error(ErrorCode::UnsupportedFormat, "BMP core headers are not supported");
  const auto w = static_cast<int32_t>(le32(b, 18));
  const auto hRaw = static_cast<int32_t>(le32(b, 22));
  const uint16_t planes = le16(b, 26);
  const uint16_t bpp = le16(b, 28);
  const uint32_t compression = le32(b, 30);
  if (planes != 1) throw Error(ErrorCode::MalformedHeader, "BMP planes must be 1");
  if (bpp != 24 || compression != 0) {
    throw Error(ErrorCode::UnsupportedFormat, "only uncompressed 24-bit BMP is supported");
  }
  if (w < 1 || hRaw == 0 || hRaw == INT32_MIN || w > (1 << 24) || std::abs(hRaw) > (1 << 24)) {
    throw Error(ErrorCode::MalformedHeader, "bad BMP dimensions");
  }
  const bool bottomUp = hRaw > 0;
  const int h = bottomUp ? hRaw : -hRaw;
  if (offset < 54 || offset > b.size()) throw Error(ErrorCode::MalformedHeader, "bad raster offset");
  const size_t stride = (static_cast<size_t>(w) * 3 + 3) / 4 * 4;
  // The final row does not need its padding.
  const size_t need = stride * static_cast<size_t>(h - 1) + static_cast<size_t>(w) * 3;
  if (b.size() - offset < need) throw Error(ErrorCode::TruncatedData, "BMP raster is truncated");
  ImageRecord img(w, h, ImageMode::Rgb8);
  for (int y = 0; y < h; ++y) {
    const int srcRow = bottomUp ? h - 1 - y : y;
    const uint8_t* row = b.data() + offset + stride * static_cast<size_t>(srcRow);
    for (int x = 0; x < w; ++x) {
      img.at(x, y, 0) = row[x * 3 + 2];
      img.at(x, y, 1) = row[x * 3 + 1];
      img.at(x, y, 2) = row[x * 3 + 0];
    }
  }
  return img;
}

std::vector<uint8_t> encodePnm(const ImageRecord& img) {
  std::string head = std::string(img.mode == ImageMode::Gray8 ? "P5" : "P6") + "\n" +
                     std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<uint8_t> out(head.begin(), head.end());
  out.insert(out.end(), img.data.begin(), img.data.end());
  return out;
}

std::vector<uint8_t> encodeBmp(const ImageRecord& img) {
  const size_t stride = (static_cast<size_t>(img.width) * 3 + 3) / 4 * 4;
  const size_t raster = stride * static_cast<size_t>(img.height);
  std::vector<uint8_t> out;
  out.reserve(54 + raster);
  out.push_back('B');
  out.push_back('M');
  put32(out, static_cast<uint32_t>(54 + raster));
  put32(out, 0);
  put32(out, 54);
  put32(out, 40);
  put32(out, static_cast<uint32_t>(img.width));
  put32(out, static_cast<uint32_t>(img.height));
  put16(out, 1);
  put16(out, 24);
  put32(out, 0);
  put32(out, static_cast<uint32_t>(raster));
  put32(out, 2835);
  put32(out, 2835);
  put32(out, 0);
  put32(out, 0);
  for (int y = img.height - 1; y >= 0; --y) {
    for (int x = 0; x < img.width; ++x) {
      out.push_back(img.at(x, y, 2));
      out.push_back(img.at(x, y, 1));
      out.push_back(img.at(x, y, 0));
    }
    for (size_t p = static_cast<size_t>(img.width) * 3; p < stride; ++p) out.push_back(0);
  }
  return out;
}

}  // namespace

ImageFormat parseImageFormat(std::string_view name) {
  if (!name.empty() && name.front() == '.') name.remove_prefix(1);
  std::string lower;
  for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "pgm") return ImageFormat::Pgm;
  if (lower == "ppm") return ImageFormat::Ppm;
  if (lower == "bmp") return ImageFormat::Bmp;
  throw Error(ErrorCode::UnsupportedFormat, "unsupported image format '" + std::string(name) + "'");
}

ImageFormat formatForPath(const std::filesystem::path& path) {
  return parseImageFormat(path.extension().string());
}

ImageRecord decodeImage(std::span<const uint8_t> bytes, std::optional<ImageFormat> hint) {
  ImageFormat f;
  if (hint) {
    f = *hint;
  } else if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
    f = ImageFormat::Pgm;
  } else if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
    f = ImageFormat::Ppm;
  } else if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M') {
    f = ImageFormat::Bmp;
  } else {
    throw Error(ErrorCode::UnsupportedFormat, "unrecognized image signature");
  }
  switch (f) {
    case ImageFormat::Pgm: return decodePnm(bytes, ImageMode::Gray8);
    case ImageFormat::Ppm: return decodePnm(bytes, ImageMode::Rgb8);
    case ImageFormat::Bmp: return decodeBmp(bytes);
  }
  throw Error(ErrorCode::UnsupportedFormat, "unknown format");
}

std::vector<uint8_t> encodeImage(const ImageRecord& img, ImageFormat format) {
  if (!img.wellFormed()) throw Error(ErrorCode::InvalidArgument, "image data does not match its size");
  const ImageMode want = format == ImageFormat::Pgm ? ImageMode::Gray8 : ImageMode::Rgb8;
  if (img.mode != want) {
    throw Error(ErrorCode::UnsupportedFormat, std::string(imageModeName(img.mode)) +
                                                  " images cannot be written in this format");
  }
  return format == ImageFormat::Bmp ? encodeBmp(img) : encodePnm(img);
}

ImageRecord readImageFile(const std::filesystem::path& path) {
  auto img = decodeImage(readFileBytes(path), formatForPath(path));
  img.path = path.string();
  return img;
}

void writeImageFile(const ImageRecord& img, const std::filesystem::path& path) {
  writeFileBytes(path, encodeImage(img, formatForPath(path)));
}

}  // namespace tundra
