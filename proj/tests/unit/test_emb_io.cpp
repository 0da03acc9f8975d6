// Copyright 2026 The seedgen Authors.
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

#include <fstream>

#include <gtest/gtest.h>

#include "seedgen/emb_io.hpp"
#include "seedgen/errors.hpp"
#include "support/fixtures.hpp"

namespace seedgen {
namespace {

using Eigen::MatrixXf;

TEST(Emb1, EncodesLittleEndianColumns) {
  MatrixXf m(2, 1);
  m << 1.0f, -2.0f;
  const std::string b = encode_emb1(m);
  ASSERT_EQ(b.size(), 4u + 4u + 8u + 8u);
  EXPECT_EQ(b.substr(0, 4), "EMB1");
  EXPECT_EQ(static_cast<unsigned char>(b[4]), 2);  // dim
  EXPECT_EQ(static_cast<unsigned char>(b[8]), 1);  // count
  // 1.0f = 0x3f800000, little-endian.
  EXPECT_EQ(static_cast<unsigned char>(b[16 + 3]), 0x3f);
  EXPECT_EQ(static_cast<unsigned char>(b[16 + 2]), 0x80);
  EXPECT_EQ(static_cast<unsigned char>(b[20 + 3]), 0xc0);
}

TEST(Emb1, RoundTripIsBitExact) {
  const MatrixXf m = MatrixXf::Random(16, 37);
  EXPECT_EQ(decode_emb1(encode_emb1(m)), m);
  EXPECT_EQ(decode_emb1(encode_emb1(MatrixXf(5, 0))).cols(), 0);
}

TEST(Emb1, RejectsCorruptInput) {
  const std::string good = encode_emb1(MatrixXf::Random(4, 3));
  std::string bad = good;
  bad[0] = 'X';
  EXPECT_THROW(decode_emb1(bad), DataError);
  EXPECT_THROW(decode_emb1(good.substr(0, good.size() - 1)), DataError);
  EXPECT_THROW(decode_emb1(good.substr(0, 10)), DataError);
  EXPECT_THROW(decode_emb1(good + "x"), DataError);
  EXPECT_THROW(decode_emb1(good, 5), DataError);
  try {
    decode_emb1(good, 5);
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("dim mismatch"), std::string::npos);
  }
}

TEST(EmbeddingSet, SaveLoadWithSidecar) {
  testing::TempDir tmp;
  EmbeddingSet s{MatrixXf::Random(3, 2), {"a", "b"}, {1, 0}, {{{"target_id", "x"}}, {{"target_id", "y"}}}};
  const auto path = tmp.path() / "set.emb1";
  save_embeddings(path, s);
  EXPECT_TRUE(std::filesystem::exists(sidecar_path(path)));
  EXPECT_EQ(sidecar_path(path).extension(), ".jsonl");
  const EmbeddingSet l = load_embeddings(path, 3);
  EXPECT_EQ(l.vectors, s.vectors);
  EXPECT_EQ(l.ids, s.ids);
  EXPECT_EQ(l.genres, s.genres);
  EXPECT_EQ(l.extra[1].at("target_id"), "y");
  EXPECT_THROW(load_embeddings(path, 4), DataError);
}

TEST(EmbeddingSet, SidecarMismatchIsDataError) {
  testing::TempDir tmp;
  const auto path = tmp.path() / "set.emb1";
  save_embeddings(path, EmbeddingSet{MatrixXf::Random(3, 2), {"a", "b"}, {}, {}});
  std::ofstream(sidecar_path(path)) << "{\"id\":\"a\"}\n";
  EXPECT_THROW(load_embeddings(path), DataError);
  std::ofstream(sidecar_path(path)) << "not json\n{\"id\":\"b\"}\n";
  EXPECT_THROW(load_embeddings(path), DataError);
  std::filesystem::remove(sidecar_path(path));
  EXPECT_THROW(load_embeddings(path), DataError);
  EXPECT_THROW(load_embeddings(tmp.path() / "missing.emb1"), DataError);
  EXPECT_THROW(save_embeddings(path, EmbeddingSet{MatrixXf::Random(3, 2), {"a"}, {}, {}}), ConfigError);
}

}  // namespace
}  // namespace seedgen
