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

// Conditional diffusion prior over target embeddings: denoisers, guidance,
// gradient steering, the Euler-Maruyama sampler and the denoising trainer.
//
// Batched quantities are column-major: one embedding per column.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "seedgen/nn.hpp"
#include "seedgen/rng.hpp"
#include "seedgen/schedule.hpp"

namespace seedgen {

// Predicts clean target embeddings from noisy ones. Implementations must be
// pure: same inputs, same outputs.
class Denoiser {
 public:
  virtual ~Denoiser() = default;

  virtual int target_dim() const = 0;
  virtual int cond_dim() const = 0;

  // z: target_dim x B, cond: cond_dim x B (a zero column is "unconditional").
  // When `upstream` is given, `*vjp` receives J^T upstream per column, where J
  // is the Jacobian of the output with respect to z.
  virtual Eigen::MatrixXd denoise(const Eigen::MatrixXd& z, double sigma,
                                  const Eigen::MatrixXd& cond,
                                  const Eigen::MatrixXd* upstream = nullptr,
                                  Eigen::MatrixXd* vjp = nullptr) const = 0;
};

// Trained parameters plus the schedule they were trained under.
struct DenoiserModel {
  nn::Params params;
  ScheduleConfig schedule;
};

// D(z, sigma, q) = c_skip z + c_out F(c_in z, c_noise, q).
class NetworkDenoiser final : public Denoiser {
 public:
  explicit NetworkDenoiser(const DenoiserModel& model);

  int target_dim() const override { return net_.spec().output_dim; }
  int cond_dim() const override { return net_.spec().cond_dim; }
  const ScheduleConfig& schedule() const { return schedule_; }
  const nn::Network& network() const { return net_; }

  Eigen::MatrixXd denoise(const Eigen::MatrixXd& z, double sigma, const Eigen::MatrixXd& cond,
                          const Eigen::MatrixXd* upstream = nullptr,
                          Eigen::MatrixXd* vjp = nullptr) const override;

 private:
  nn::Network net_;
  ScheduleConfig schedule_;
};

struct SteerSignal {
  Eigen::VectorXd vector;  // unit-norm, target space
  double strength = 0.0;   // negative strengths repel
};

struct SlerpSteer {
  Eigen::VectorXd target;
  double ratio = 0.55;
};

enum class DriftForm {
  kZMinus2D,    // (sigma_dot/sigma) z - 2 (sigma_dot/sigma) D
  kStandardVe,  // 2 (sigma_dot/sigma) (z - D)
};

std::string to_string(DriftForm form);
DriftForm drift_form_from_string(const std::string& name);

struct SamplerConfig {
  int steps = 256;
  double rho = 7.0;
  double omega = 0.0;
  std::vector<SteerSignal> steers;
  DriftForm drift_form = DriftForm::kStandardVe;
  bool post_normalize = true;
  std::optional<SlerpSteer> slerp;
  std::uint64_t seed = 0;

  void validate(int target_dim) const;
};

// Scalar knobs only; steer and slerp vectors are resolved by the caller.
void to_json(nlohmann::json& j, const SamplerConfig& c);
void from_json(const nlohmann::json& j, SamplerConfig& c);

struct TrainConfig {
  double p_mask = 0.1;
  int batch_size = 128;
  long total_steps = 20000;
  long warmup = 1000;
  double peak_lr = 1e-3;
  std::uint64_t seed = 0;
  bool estimate_sigma_data = true;  // replace schedule.sigma_data by the training-target spread

  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

// (1 + omega) D(z, q) - omega D(z, 0). Both branches run in one batched call.
Eigen::MatrixXd cfg_denoise(const Denoiser& model, const Eigen::MatrixXd& z, double sigma,
                            const Eigen::MatrixXd& cond, double omega);

// cfg_denoise plus sum_n k_n grad_z <D'(z), v_n>. With no steers, or with
// strengths summing to an exact zero vector, the result equals cfg_denoise
// bit for bit.
Eigen::MatrixXd steer_denoise(const Denoiser& model, const Eigen::MatrixXd& z, double sigma,
                              const Eigen::MatrixXd& cond, double omega,
                              const std::vector<SteerSignal>& steers);

// Spherical interpolation between unit vectors. Throws on antipodal input.
Eigen::VectorXd slerp_steer(const Eigen::VectorXd& z, const Eigen::VectorXd& target,
                            double ratio);

// Draws `count` seed embeddings for one condition vector. Returns
// target_dim x count. Throws NumericError carrying the solver step when the
// state stops being finite.
Eigen::MatrixXd sample(const Denoiser& model, const Eigen::VectorXd& cond,
                       const ScheduleConfig& schedule, const SamplerConfig& sampler,
                       int count);

// Population standard deviation of the targets (per-coordinate centered,
// pooled over coordinates).
double estimate_sigma_data(const Eigen::MatrixXd& targets);

// Per-example weighted denoising losses lambda(sigma) ||D - z||^2 for fresh
// noise draws; used to compare denoisers on the same draws.
Eigen::VectorXd denoising_losses(const Denoiser& model, const Eigen::MatrixXd& queries,
                                 const Eigen::MatrixXd& targets, const ScheduleConfig& schedule,
                                 double p_mask, Rng& rng);

// Single-writer trainer for the denoising objective.
class DiffusionTrainer {
 public:
  DiffusionTrainer(const nn::NetworkSpec& spec, const ScheduleConfig& schedule,
                   const TrainConfig& cfg);

  // One optimizer step on the given batch (queries: cond_dim x B,
  // targets: target_dim x B). Returns the batch loss before the update.
  double train_step(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& targets);

  // Runs cfg.total_steps steps drawing batches uniformly with replacement.
  void fit(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& targets,
           const std::function<void(long step, double loss)>& on_step = {});

  long step() const { return step_; }
  DenoiserModel model() const { return {params_, schedule_}; }

 private:
  nn::Params params_;
  nn::OptimizerState opt_;
  ScheduleConfig schedule_;
  TrainConfig cfg_;
  Rng rng_;
  long step_ = 0;
};

}  // namespace seedgen
