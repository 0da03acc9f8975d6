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

// Deterministic baseline: the denoiser backbone with its noisy-embedding input
// held at zero and its noise feature pinned, trained to map queries straight
// to target embeddings.

#pragma once

#include <functional>

#include <Eigen/Core>

#include "seedgen/diffusion.hpp"
#include "seedgen/nn.hpp"

namespace seedgen {

struct RegressionModel {
  nn::Params params;
  double noise_feature = 0.0;  // c_noise(sigma_data)
};

class RegressionTrainer {
 public:
  RegressionTrainer(const nn::NetworkSpec& spec, double sigma_data, const TrainConfig& cfg);

  // Mean squared error of the batch before the update.
  double train_step(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& targets);
  void fit(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& targets,
           const std::function<void(long step, double loss)>& on_step = {});

  long step() const { return step_; }
  RegressionModel model() const { return {params_, noise_feature_}; }

 private:
  nn::Params params_;
  nn::OptimizerState opt_;
  double noise_feature_;
  TrainConfig cfg_;
  Rng rng_;
  long step_ = 0;
};

// queries: query_dim x n. Returns target_dim x n, renormalized to unit length
// when `normalize` is set.
Eigen::MatrixXd predict(const RegressionModel& model, const Eigen::MatrixXd& queries,
                        bool normalize = false);

}  // namespace seedgen
