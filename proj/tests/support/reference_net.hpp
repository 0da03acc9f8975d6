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

// Scalar-loop re-implementation of the denoiser network forward pass, read
// straight from the flat parameter vector. Used as an independent oracle for
// the Eigen implementation.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "seedgen/nn.hpp"

namespace seedgen::testing {

inline std::vector<double> reference_forward(const nn::Params& p, const std::vector<double>& x,
                                             double noise, const std::vector<double>& cond) {
  const auto layout = nn::ParamLayout::for_spec(p.spec);
  auto at = [&](const std::string& name, long r, long c) {
    const auto& s = layout.find(name);
    return double(p.values[s.offset + std::size_t(r * s.cols + c)]);
  };
  auto bias = [&](const std::string& name, long r) { return at(name, r, 0); };
  auto silu = [](double v) { return v / (1.0 + std::exp(-v)); };
  const int w = p.spec.width;

  std::vector<double> in(x);
  in.insert(in.end(), cond.begin(), cond.end());
  std::vector<double> h(static_cast<std::size_t>(w), 0.0);
  for (int i = 0; i < w; ++i) {
    double acc = bias("stem.b", i);
    for (std::size_t j = 0; j < in.size(); ++j) acc += at("stem.w", i, long(j)) * in[j];
    h[std::size_t(i)] = acc;
  }

  std::vector<double> act(static_cast<std::size_t>(w));
  for (int i = 0; i < w; ++i) act[std::size_t(i)] = silu(at("noise.w1", i, 0) * noise + bias("noise.b1", i));
  const int mod_size = 2 * w * p.spec.num_blocks;
  std::vector<double> mod(static_cast<std::size_t>(mod_size));
  for (int i = 0; i < mod_size; ++i) {
    double acc = bias("noise.b2", i);
    for (int j = 0; j < w; ++j) acc += at("noise.w2", i, j) * act[std::size_t(j)];
    mod[std::size_t(i)] = acc;
  }

  for (int k = 0; k < p.spec.num_blocks; ++k) {
    const std::string pre = "block" + std::to_string(k);
    std::vector<double> u(cond.size() + std::size_t(w));
    for (int i = 0; i < w; ++i) {
      const double scale = mod[std::size_t(2 * k * w + i)];
      const double shift = mod[std::size_t((2 * k + 1) * w + i)];
      u[std::size_t(i)] = h[std::size_t(i)] * (1.0 + scale) + shift;
    }
    for (std::size_t j = 0; j < cond.size(); ++j) u[std::size_t(w) + j] = cond[j];
    std::vector<double> a(static_cast<std::size_t>(w));
    for (int i = 0; i < w; ++i) {
      double acc = bias(pre + ".b1", i);
      for (std::size_t j = 0; j < u.size(); ++j) acc += at(pre + ".w1", i, long(j)) * u[j];
      a[std::size_t(i)] = silu(acc);
    }
    for (int i = 0; i < w; ++i) {
      double acc = bias(pre + ".b2", i);
      for (int j = 0; j < w; ++j) acc += at(pre + ".w2", i, j) * a[std::size_t(j)];
      h[std::size_t(i)] += acc;
    }
  }

  std::vector<double> y(static_cast<std::size_t>(p.spec.output_dim));
  for (int i = 0; i < p.spec.output_dim; ++i) {
    double acc = bias("out.b", i);
    for (int j = 0; j < w; ++j) acc += at("out.w", i, j) * h[std::size_t(j)];
    y[std::size_t(i)] = acc;
  }
  return y;
}

}  // namespace seedgen::testing
