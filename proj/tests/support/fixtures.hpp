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

#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Core>
#include <gtest/gtest.h>

#include "seedgen/nn.hpp"
#include "seedgen/rng.hpp"
#include "seedgen/world.hpp"

namespace seedgen::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = info ? std::string(info->test_suite_name()) + "_" + info->name() : "seedgen";
    path_ = std::filesystem::temp_directory_path() /
            ("seedgen_" + name + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline WorldConfig small_world(std::uint64_t seed = 7) {
  WorldConfig c;
  c.target_dim = 8;
  c.query_dim = 12;
  c.num_genres = 4;
  c.items_per_genre = 30;
  c.ambiguity = 2;
  c.seed = seed;
  return c;
}

// Random network with every tensor (including zero-init ones) filled.
inline nn::Params random_params(const nn::NetworkSpec& spec, std::uint64_t seed, double scale = 0.5) {
  nn::Params p = nn::init_params(spec, seed);
  Rng rng(derive_seed(seed, 99));
  for (auto& v : p.values) v = static_cast<float>(scale * rng.normal());
  return p;
}

inline Eigen::MatrixXd unit_columns(Eigen::MatrixXd m) {
  m.colwise().normalize();
  return m;
}

}  // namespace seedgen::testing
