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

#include "seedgen/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "seedgen/errors.hpp"

namespace seedgen {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

NetworkDenoiser::NetworkDenoiser(const DenoiserModel& model)
    : net_(model.params), schedule_(model.schedule) {
  schedule_.validate();
  if (net_.spec().input_dim != net_.spec().output_dim) {
    throw ConfigError("denoiser: network input and output dimensions must match");
  }
}

MatrixXd NetworkDenoiser::denoise(const MatrixXd& z, double sigma, const MatrixXd& cond,
                                  const MatrixXd* upstream, MatrixXd* vjp) const {
  if (z.rows() != target_dim() || cond.rows() != cond_dim() || cond.cols() != z.cols()) {
    throw ConfigError("denoise: dimension mismatch");
  }
  const Precond p = precond_coeffs(sigma, schedule_);
  RowVectorXd noise(1);
  noise(0) = p.c_noise;
  if (!upstream) {
    return p.c_skip * z + p.c_out * net_.forward(p.c_in * z, noise, cond);
  }
  nn::ForwardTrace trace;
  MatrixXd out = p.c_skip * z + p.c_out * net_.forward(p.c_in * z, noise, cond, &trace);
  *vjp = p.c_skip * (*upstream) + (p.c_out * p.c_in) * nn::vjp_input(trace, *upstream);
  return out;
}

std::string to_string(DriftForm form) {
  return form == DriftForm::kZMinus2D ? "z_minus_2d" : "standard_ve";
}

DriftForm drift_form_from_string(const std::string& name) {
  if (name == "z_minus_2d") return DriftForm::kZMinus2D;
  if (name == "standard_ve") return DriftForm::kStandardVe;
  throw ConfigError("unknown drift_form '" + name + "'");
}

void SamplerConfig::validate(int target_dim) const {
  if (steps < 2) throw ConfigError("sampler: steps must be >= 2");
  if (!(rho > 0.0)) throw ConfigError("sampler: rho must be > 0");
  if (!std::isfinite(omega)) throw ConfigError("sampler: omega must be finite");
  for (const auto& s : steers) {
    if (s.vector.size() != target_dim) throw ConfigError("sampler: steer vector dimension mismatch");
    if (!std::isfinite(s.strength)) throw ConfigError("sampler: steer strength must be finite");
  }
  if (slerp) {
    if (slerp->ratio < 0.0 || slerp->ratio > 1.0) throw ConfigError("sampler: slerp ratio must lie in [0, 1]");
    if (slerp->target.size() != target_dim) throw ConfigError("sampler: slerp target dimension mismatch");
  }
}

void to_json(nlohmann::json& j, const SamplerConfig& c) {
  j = {{"steps", c.steps},
       {"rho", c.rho},
       {"omega", c.omega},
       {"drift_form", to_string(c.drift_form)},
       {"post_normalize", c.post_normalize},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, SamplerConfig& c) {
  c.steps = j.value("steps", c.steps);
  c.rho = j.value("rho", c.rho);
  c.omega = j.value("omega", c.omega);
  if (j.contains("drift_form")) c.drift_form = drift_form_from_string(j.at("drift_form").get<std::string>());
  c.post_normalize = j.value("post_normalize", c.post_normalize);
  c.seed = j.value("seed", c.seed);
}

void TrainConfig::validate() const {
  if (p_mask < 0.0 || p_mask > 1.0) throw ConfigError("train: p_mask must lie in [0, 1]");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (total_steps < 1) throw ConfigError("train: total_steps must be >= 1");
  if (warmup < 0 || warmup > total_steps) throw ConfigError("train: need 0 <= warmup <= total_steps");
  if (!(peak_lr > 0.0)) throw ConfigError("train: peak_lr must be > 0");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"p_mask", c.p_mask},
       {"batch_size", c.batch_size},
       {"total_steps", c.total_steps},
       {"warmup", c.warmup},
       {"peak_lr", c.peak_lr},
       {"seed", c.seed},
       {"estimate_sigma_data", c.estimate_sigma_data}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  c.p_mask = j.value("p_mask", c.p_mask);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.total_steps = j.value("total_steps", c.total_steps);
  c.warmup = j.value("warmup", c.warmup);
  c.peak_lr = j.value("peak_lr", c.peak_lr);
  c.seed = j.value("seed", c.seed);
  c.estimate_sigma_data = j.value("estimate_sigma_data", c.estimate_sigma_data);
}

MatrixXd cfg_denoise(const Denoiser& model, const MatrixXd& z, double sigma, const MatrixXd& cond,
                     double omega) {
  const Eigen::Index n = z.cols();
  MatrixXd z2(z.rows(), 2 * n);
  z2 << z, z;
  MatrixXd c2(cond.rows(), 2 * n);
  c2 << cond, MatrixXd::Zero(cond.rows(), n);
  const MatrixXd d = model.denoise(z2, sigma, c2);
  return (1.0 + omega) * d.leftCols(n) - omega * d.rightCols(n);
}

MatrixXd steer_denoise(const Denoiser& model, const MatrixXd& z, double sigma, const MatrixXd& cond,
                       double omega, const std::vector<SteerSignal>& steers) {
  if (steers.empty()) return cfg_denoise(model, z, sigma, cond, omega);
  VectorXd direction = VectorXd::Zero(z.rows());
  for (const auto& s : steers) {
    if (s.vector.size() != z.rows()) throw ConfigError("steer_denoise: steer vector dimension mismatch");
    direction += s.strength * s.vector;
  }
  const Eigen::Index n = z.cols();
  MatrixXd z2(z.rows(), 2 * n);
  z2 << z, z;
  MatrixXd c2(cond.rows(), 2 * n);
  c2 << cond, MatrixXd::Zero(cond.rows(), n);
  MatrixXd upstream(z.rows(), 2 * n);
  upstream.leftCols(n) = ((1.0 + omega) * direction).replicate(1, n);
  upstream.rightCols(n) = (-omega * direction).replicate(1, n);
  MatrixXd vjp;
  const MatrixXd d = model.denoise(z2, sigma, c2, &upstream, &vjp);
  MatrixXd guided = (1.0 + omega) * d.leftCols(n) - omega * d.rightCols(n);
  return guided + (vjp.leftCols(n) + vjp.rightCols(n));
}

VectorXd slerp_steer(const VectorXd& z, const VectorXd& target, double ratio) {
  if (z.size() != target.size()) throw ConfigError("slerp: dimension mismatch");
  if (ratio < 0.0 || ratio > 1.0) throw ConfigError("slerp: ratio must lie in [0, 1]");
  if (std::abs(z.norm() - 1.0) > 1e-4 || std::abs(target.norm() - 1.0) > 1e-4) {
    throw ConfigError("slerp: inputs must be unit-norm");
  }
  const double cosine = std::clamp(z.dot(target), -1.0, 1.0);
  const double phi = std::acos(cosine);
  if (std::numbers::pi - phi < 1e-6) throw ConfigError("slerp: antipodal inputs");
  if (phi < 1e-12) return z;
  const double s = std::sin(phi);
  VectorXd out = (std::sin((1.0 - ratio) * phi) / s) * z + (std::sin(ratio * phi) / s) * target;
  return out / out.norm();
}

MatrixXd sample(const Denoiser& model, const VectorXd& cond, const ScheduleConfig& schedule,
                const SamplerConfig& sampler, int count) {
  schedule.validate();
  sampler.validate(model.target_dim());
  if (count < 1) throw ConfigError("sample: count must be >= 1");
  if (cond.size() != model.cond_dim()) throw ConfigError("sample: condition dimension mismatch");

  const auto sigmas = karras_sigmas(sampler.steps, sampler.rho, schedule.sigma_min, schedule.sigma_top());
  std::vector<double> ts(sigmas.size());
  for (std::size_t i = 0; i < sigmas.size(); ++i) ts[i] = t_of_sigma(sigmas[i], schedule);

  Rng rng(sampler.seed);
  const MatrixXd conds = cond.replicate(1, count);
  MatrixXd z = schedule.sigma_top() * rng.normal_matrix(model.target_dim(), count);

  for (std::size_t i = 0; i + 1 < sigmas.size(); ++i) {
    const double sigma = sigmas[i];
    const MatrixXd d = steer_denoise(model, z, sigma, conds, sampler.omega, sampler.steers);
    const double rate = sigma_dot(ts[i], schedule) / sigma;
    const double dt = ts[i + 1] - ts[i];
    MatrixXd drift = sampler.drift_form == DriftForm::kStandardVe
                         ? MatrixXd(2.0 * rate * (z - d))
                         : MatrixXd(rate * z - 2.0 * rate * d);
    const double diffusion = std::sqrt(2.0 * sigma_dot(ts[i], schedule) * sigma * std::abs(dt));
    z += dt * drift + diffusion * rng.normal_matrix(z.rows(), z.cols());
    if (!z.allFinite()) {
      throw NumericError("sample: non-finite state at step " + std::to_string(i), long(i));
    }
  }
  MatrixXd out = steer_denoise(model, z, sigmas.back(), conds, sampler.omega, sampler.steers);
  if (!out.allFinite()) {
    throw NumericError("sample: non-finite output at step " + std::to_string(sigmas.size() - 1),
                       long(sigmas.size() - 1));
  }
  if (sampler.post_normalize || sampler.slerp) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      const double n = out.col(c).norm();
      if (!(n > 0.0)) throw NumericError("sample: zero-norm sample", long(sigmas.size() - 1));
      if (sampler.slerp) {
        out.col(c) = slerp_steer(out.col(c) / n, sampler.slerp->target, sampler.slerp->ratio);
      } else {
        out.col(c) /= n;
      }
    }
  }
  return out;
}

double estimate_sigma_data(const MatrixXd& targets) {
  if (targets.cols() < 2) throw DataError("sigma_data: need at least two targets");
  const VectorXd mean = targets.rowwise().mean();
  const double ss = (targets.colwise() - mean).squaredNorm();
  return std::sqrt(ss / double(targets.size()));
}

namespace {

struct NoiseDraw {
  std::vector<double> sigma;
  std::vector<bool> masked;
  MatrixXd eps;
};

NoiseDraw draw_noise(Rng& rng, Eigen::Index dim, Eigen::Index batch, const ScheduleConfig& schedule,
                     double p_mask) {
  NoiseDraw d;
  d.sigma.resize(batch);
  d.masked.resize(batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    d.sigma[b] = sample_train_sigma(rng, schedule);
    d.masked[b] = rng.uniform() < p_mask;
  }
  d.eps = rng.normal_matrix(dim, batch);
  return d;
}

}  // namespace

VectorXd denoising_losses(const Denoiser& model, const MatrixXd& queries, const MatrixXd& targets,
                          const ScheduleConfig& schedule, double p_mask, Rng& rng) {
  if (queries.cols() != targets.cols()) throw ConfigError("denoising_losses: batch size mismatch");
  const NoiseDraw noise = draw_noise(rng, targets.rows(), targets.cols(), schedule, p_mask);
  VectorXd losses(targets.cols());
  for (Eigen::Index b = 0; b < targets.cols(); ++b) {
    const double sigma = noise.sigma[b];
    const MatrixXd zn = targets.col(b) + sigma * noise.eps.col(b);
    const MatrixXd q = noise.masked[b] ? MatrixXd(MatrixXd::Zero(queries.rows(), 1))
                                       : MatrixXd(queries.col(b));
    const MatrixXd d = model.denoise(zn, sigma, q);
    losses(b) = loss_weight(sigma, schedule) * (d - targets.col(b)).squaredNorm();
  }
  return losses;
}

DiffusionTrainer::DiffusionTrainer(const nn::NetworkSpec& spec, const ScheduleConfig& schedule,
                                   const TrainConfig& cfg)
    : params_(nn::init_params(spec, derive_seed(cfg.seed, 1))),
      opt_(nn::OptimizerState::for_params(params_)),
      schedule_(schedule),
      cfg_(cfg),
      rng_(derive_seed(cfg.seed, 2)) {
  schedule_.validate();
  cfg_.validate();
  if (spec.input_dim != spec.output_dim) {
    throw ConfigError("diffusion trainer: input_dim must equal output_dim");
  }
}

double DiffusionTrainer::train_step(const MatrixXd& queries, const MatrixXd& targets) {
  const Eigen::Index batch = targets.cols();
  if (batch == 0 || queries.cols() != batch) throw ConfigError("train_step: empty or ragged batch");
  const NoiseDraw noise = draw_noise(rng_, targets.rows(), batch, schedule_, cfg_.p_mask);

  MatrixXd q = queries;
  MatrixXd noisy(targets.rows(), batch);
  MatrixXd x(targets.rows(), batch);
  RowVectorXd noise_feature(batch);
  VectorXd c_skip(batch), c_out(batch), weight(batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const double sigma = noise.sigma[b];
    const Precond p = precond_coeffs(sigma, schedule_);
    if (noise.masked[b]) q.col(b).setZero();
    noisy.col(b) = targets.col(b) + sigma * noise.eps.col(b);
    x.col(b) = p.c_in * noisy.col(b);
    noise_feature(b) = p.c_noise;
    c_skip(b) = p.c_skip;
    c_out(b) = p.c_out;
    weight(b) = loss_weight(sigma, schedule_);
  }

  nn::Network net(params_);
  nn::ForwardTrace trace;
  const MatrixXd raw = net.forward(x, noise_feature, q, &trace);
  const MatrixXd residual = noisy * c_skip.asDiagonal() + raw * c_out.asDiagonal() - targets;
  const VectorXd per_example = residual.colwise().squaredNorm().transpose();
  const double loss = weight.dot(per_example) / double(batch);
  if (!std::isfinite(loss)) {
    throw NumericError("train_step: non-finite loss at step " + std::to_string(step_), step_);
  }

  const VectorXd scale = (2.0 / double(batch)) * weight.cwiseProduct(c_out);
  const nn::ParamGradients grads = nn::grad_params(trace, residual * scale.asDiagonal());
  const double lr = nn::cosine_lr(std::min(step_, cfg_.total_steps), cfg_.warmup, cfg_.total_steps,
                                  cfg_.peak_lr);
  if (lr > 0.0) nn::adam_step(opt_, params_, grads, lr);
  ++step_;
  return loss;
}

void DiffusionTrainer::fit(const MatrixXd& queries, const MatrixXd& targets,
                           const std::function<void(long, double)>& on_step) {
  const Eigen::Index n = targets.cols();
  if (n == 0 || queries.cols() != n) throw DataError("fit: empty or ragged training set");
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

}  // namespace seedgen
