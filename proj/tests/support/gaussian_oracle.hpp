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

// Closed-form denoiser for a Gaussian target N(m, C): the posterior mean
// D(z; sigma) = m + C (C + sigma^2 I)^{-1} (z - m), with Jacobian
// C (C + sigma^2 I)^{-1}. An optional linear condition shifts the mean by
// A c, so conditional and unconditional branches differ.

#pragma once

#include <Eigen/Dense>

#include "seedgen/diffusion.hpp"

namespace seedgen::testing {

class GaussianDenoiser final : public Denoiser {
 public:
  GaussianDenoiser(Eigen::VectorXd mean, Eigen::MatrixXd cov, Eigen::MatrixXd cond_map = {})
      : mean_(std::move(mean)), cov_(std::move(cov)), cond_map_(std::move(cond_map)) {
    if (cond_map_.size() == 0) cond_map_ = Eigen::MatrixXd::Zero(mean_.size(), 1);
  }

  int target_dim() const override { return int(mean_.size()); }
  int cond_dim() const override { return int(cond_map_.cols()); }

  Eigen::MatrixXd gain(double sigma) const {
    const Eigen::Index d = mean_.size();
    const Eigen::MatrixXd a = cov_ + sigma * sigma * Eigen::MatrixXd::Identity(d, d);
    return cov_ * a.ldlt().solve(Eigen::MatrixXd::Identity(d, d));
  }

  Eigen::MatrixXd denoise(const Eigen::MatrixXd& z, double sigma, const Eigen::MatrixXd& cond,
                          const Eigen::MatrixXd* upstream, Eigen::MatrixXd* vjp) const override {
    const Eigen::MatrixXd g = gain(sigma);
    const Eigen::MatrixXd means = (cond_map_ * cond).colwise() + mean_;
    if (upstream && vjp) *vjp = g.transpose() * *upstream;
    return means + g * (z - means);
  }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd cond_map_;
};

}  // namespace seedgen::testing
