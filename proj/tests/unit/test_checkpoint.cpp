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

#include "seedgen/checkpoint.hpp"
#include "seedgen/errors.hpp"
#include "support/fixtures.hpp"

namespace seedgen {
namespace {

DenoiserModel diffusion_model() {
  ScheduleConfig s;
  s.sigma_data = 0.21;
  return {testing::random_params({4, 3, 6, 2, 4}, 1), s};
}

TEST(Checkpoint, DiffusionRoundTrip) {
  const DenoiserModel m = diffusion_model();
  const std::string bytes = encode_checkpoint(make_checkpoint(m));
  EXPECT_EQ(bytes.substr(0, 8), "DSCKPT01");
  const Checkpoint c = decode_checkpoint(bytes);
  EXPECT_EQ(c.kind, "diffusion");
  const DenoiserModel back = denoiser_from(c);
  EXPECT_EQ(back.params, m.params);
  EXPECT_EQ(back.schedule.sigma_data, 0.21);
  EXPECT_THROW(regression_from(c), DataError);
  // Encoding is canonical.
  EXPECT_EQ(encode_checkpoint(make_checkpoint(back)), bytes);
}

TEST(Checkpoint, RegressionRoundTripThroughFile) {
  testing::TempDir tmp;
  const RegressionModel m{testing::random_params({4, 3, 6, 2, 4}, 2), -0.4};
  save_checkpoint(tmp.path() / "r.ckpt", make_checkpoint(m));
  const Checkpoint c = load_checkpoint(tmp.path() / "r.ckpt");
  EXPECT_EQ(c.kind, "regression");
  const RegressionModel back = regression_from(c);
  EXPECT_EQ(back.params, m.params);
  EXPECT_EQ(back.noise_feature, -0.4);
  EXPECT_THROW(denoiser_from(c), DataError);
}

TEST(Checkpoint, HeaderDescribesLayout) {
  const Checkpoint c = make_checkpoint(diffusion_model());
  const std::string bytes = encode_checkpoint(c);
  std::uint64_t len = 0;
  for (int i = 7; i >= 0; --i) len = (len << 8) | static_cast<unsigned char>(bytes[8 + std::size_t(i)]);
  const auto header = nlohmann::json::parse(bytes.substr(16, len));
  EXPECT_EQ(header.at("kind"), "diffusion");
  EXPECT_EQ(header.at("dtype"), "float32-le");
  EXPECT_EQ(header.at("payload_bytes"), c.params.values.size() * 4);
  EXPECT_EQ(header.at("layout").front().at("name"), "stem.w");
  EXPECT_EQ(bytes.size(), 16 + len + c.params.values.size() * 4);
}

TEST(Checkpoint, RejectsCorruption) {
  const std::string good = encode_checkpoint(make_checkpoint(diffusion_model()));
  std::string bad = good;
  bad[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad), DataError);
  EXPECT_THROW(decode_checkpoint(good.substr(0, 12)), DataError);
  EXPECT_THROW(decode_checkpoint(good.substr(0, good.size() - 4)), DataError);
  EXPECT_THROW(decode_checkpoint(good + "...."), DataError);
  bad = good;
  bad[16] = '#';  // first byte of the JSON header
  EXPECT_THROW(decode_checkpoint(bad), DataError);
  EXPECT_THROW(load_checkpoint("/nonexistent/x.ckpt"), DataError);
}

}  // namespace
}  // namespace seedgen
