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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "tundra/dataframe/text_format.hpp"

namespace tundra {
namespace {

Schema everything() {
  return Schema{{"i", DType::Int64},     {"f", DType::Float64},     {"b", DType::Bool},
                {"s", DType::String},    {"raw", DType::Bytes},     {"vec", DType::FloatVector},
                {"img", DType::Image},   {"ts", DType::Timestamp}};
}

TEST(TextFormat, HeaderLayout) {
  Schema s{{"a", DType::Int64}, {"vec", DType::FloatVector}};
  EXPECT_EQ(formatSchemaHeader(s), "column:a:Int64,column:vec:FloatVector");
  EXPECT_EQ(parseSchemaHeader("column:a:Int64,column:vec:FloatVector"), s);
  EXPECT_EQ(toTextTable(s, {Row({int64_t{3}, FloatVector{1.5f, -2.0f}})}),
            "column:a:Int64,column:vec:FloatVector\n3,[1.5;-2]\n");
}

TEST(TextFormat, RoundTripsEveryKind) {
  ImageRecord img(2, 1, ImageMode::Rgb8, "cam001/17_0.ppm");
  img.data = {1, 2, 3, 250, 251, 252};
  std::vector<Row> rows{
      Row({int64_t{-42}, 0.1, true, std::string("plain"), Bytes{{0, 255, 10}},
           FloatVector{0.1f, 1e-30f, -3.25f}, img, Timestamp{1700000000}}),
      Row({Null{}, Null{}, Null{}, Null{}, Null{}, Null{}, Null{}, Null{}}),
      Row({int64_t{0}, -0.0, false, std::string(""), Bytes{}, FloatVector{}, img,
           Timestamp{-5}}),
      Row({std::numeric_limits<int64_t>::min(), 1e308, false,
           std::string("comma, \"quote\"\nnewline"), Bytes{{1}}, FloatVector{7.0f}, img,
           Timestamp{0}}),
  };
  auto text = toTextTable(everything(), rows);
  auto back = parseTextTable(text);
  EXPECT_EQ(back.schema, everything());
  ASSERT_EQ(back.rows.size(), rows.size());
  for (size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(back.rows[i], rows[i]) << "row " << i;
  EXPECT_TRUE(std::signbit(asDouble(back.rows[2][1])));
}

// Property: random doubles and floats survive a round trip bit-for-bit.
TEST(TextFormat, FloatingPointRoundTripIsExact) {
  std::mt19937_64 rng(7);
  Schema s{{"d", DType::Float64}, {"v", DType::FloatVector}};
  std::vector<Row> rows;
  for (int i = 0; i < 500; ++i) {
    uint64_t bits = rng();
    double d;
    std::memcpy(&d, &bits, sizeof d);
    if (!std::isfinite(d)) d = 1.0 / static_cast<double>(i + 1);
    uint32_t fb = static_cast<uint32_t>(rng());
    float f;
    std::memcpy(&f, &fb, sizeof f);
    if (!std::isfinite(f)) f = 0.5f;
    rows.push_back(Row({d, FloatVector{f, static_cast<float>(d)}}));
  }
  auto back = parseTextTable(toTextTable(s, rows));
  EXPECT_EQ(back.rows, rows);
}

TEST(TextFormat, Errors) {
  EXPECT_THROW(parseTextTable(""), Error);
  EXPECT_THROW(parseTextTable("column:a:Nope\n"), Error);
  EXPECT_THROW(parseTextTable("a:Int64\n"), Error);
  EXPECT_THROW(parseTextTable("column:a:Int64\nxyz\n"), Error);
  EXPECT_THROW(parseTextTable("column:a:Int64,column:b:Int64\n1\n"), Error);
  EXPECT_THROW(parseTextTable("column:a:String\n\"open\n"), Error);
  EXPECT_THROW(parseSchemaHeader("column:a:Int64,column:a:Int64"), Error);
}

}  // namespace
}  // namespace tundra
