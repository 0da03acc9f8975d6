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

#include "seedgen/regression.hpp"

#include <cmath>

#include "seedgen/errors.hpp"
#include "seedgen/schedule.hpp"

namespace seedgen {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;

RegressionTrainer::RegressionTrainer(const nn::NetworkSpec& spec, double sigma_data, const TrainConfig& cfg)
    : params_(nn::init_params(spec, derive_seed(cfg.seed, 1))),
      opt_(nn::OptimizerState::for_params(params_)),
      noise_feature_(0.25 * std::log(sigma_data)),
      cfg_(cfg),
      rng_(derive_seed(cfg.seed, 3)) {
  cfg_.validate();
  if (!(sigma_data > 0.0)) throw ConfigError("regression: sigma_data must be > 0");
}

double RegressionTrainer::train_step(const MatrixXd& queries, const MatrixXd& targets) {
  const Eigen::Index batch = targets.cols();
  if (batch == 0 || queries.cols() != batch) throw ConfigError("regression step: empty or ragged batch");
  nn::Network net(params_);
  nn::ForwardTrace trace;
  RowVectorXd noise(1);
  noise(0) = noise_feature_;
  const MatrixXd x = MatrixXd::Zero(params_.spec.input_dim, batch);
  const MatrixXd residual = net.forward(x, noise, queries, &trace) - targets;
  const double loss = residual.squaredNorm() / double(batch);
  if (!std::isfinite(loss)) {
    throw NumericError("regression step: non-finite loss at step " + std::to_string(step_), step_);
  }
  const auto grads = nn::grad_params(trace, (2.0 / double(batch)) * residual);
  const double lr = nn::cosine_lr(std::min(step_, cfg_.total_steps), cfg_.warmup, cfg_.total_steps, cfg_.peak_lr);
  if (lr > 0.0) nn::adam_step(opt_, params_, grads, lr);
  ++step_;
  return loss;
}

void RegressionTrainer::fit(const MatrixXd& queries, const MatrixXd& targets,
                            const std::function<void(long, double)>& on_step) {
  const Eigen::Index n = targets.cols();
  if (n == 0 || queries.cols() != n) throw DataError("regression fit: empty or ragged training set");
  MatrixXd qb(queries.rows(), cfg_.batch_size);
  MatrixXd zb(targets.rows(), cfg_.batch_size);
  while (step_ < cfg_.total_steps) {
    for (int b = 0; b < cfg_.batch_size; ++b) {
      const auto idx = static_cast<Eigen::Index>(rng_.below(static_cast<std::uint64_t>(n)));
      qb.col(b) = queries.col(idx);
      zb.col(b) = targets.col(idx);
    }
    const long s = step_;
    const double loss = train_step(qb, zb);
    if (on_step) on_step(s, loss);
  }
}

MatrixXd predict(const RegressionModel& model, const MatrixXd& queries, bool normalize) {
  const nn::Network net(model.params);
  if (queries.rows() != net.spec().cond_dim) throw ConfigError("predict: query dimension mismatch");
  RowVectorXd noise(1);
  noise(0) = model.noise_feature;
  MatrixXd out = net.forward(MatrixXd::Zero(net.spec().input_dim, queries.cols()), noise, queries);
  if (normalize) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      const double n = out.col(c).norm();
      if (!(n > 0.0)) throw NumericError("predict: zero-norm prediction");
      out.col(c) /= n;
    }
  }
  return out;
}

}  // namespace seedgen
