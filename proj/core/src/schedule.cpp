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

#include "seedgen/schedule.hpp"

#include <cmath>
#include <numbers>

#include "seedgen/errors.hpp"
#include "seedgen/rng.hpp"

namespace seedgen {

void ScheduleConfig::validate() const {
  if (!(sigma_data > 0.0)) throw ConfigError("schedule: sigma_data must be > 0");
  if (!(sigma_min > 0.0)) throw ConfigError("schedule: sigma_min must be > 0");
  if (!(sigma_max > sigma_min)) throw ConfigError("schedule: sigma_max must exceed sigma_min");
  if (!(alpha_max > 0.0 && alpha_max < std::numbers::pi / 2)) {
    throw ConfigError("schedule: alpha_max must lie in (0, pi/2)");
  }
}

void to_json(nlohmann::json& j, const ScheduleConfig& c) {
  j = {{"sigma_data", c.sigma_data},
       {"alpha_max", c.alpha_max},
       {"sigma_max", c.sigma_max},
       {"sigma_min", c.sigma_min}};
}

void from_json(const nlohmann::json& j, ScheduleConfig& c) {
  c.sigma_data = j.value("sigma_data", c.sigma_data);
  c.alpha_max = j.value("alpha_max", c.alpha_max);
  c.sigma_max = j.value("sigma_max", c.sigma_max);
  c.sigma_min = j.value("sigma_min", c.sigma_min);
}

double sigma_of_t(double t, const ScheduleConfig& cfg) {
  return cfg.sigma_top() * std::tan(cfg.alpha_max * t) / std::tan(cfg.alpha_max);
}

double sigma_dot(double t, const ScheduleConfig& cfg) {
  const double c = std::cos(cfg.alpha_max * t);
  return cfg.sigma_top() * cfg.alpha_max / (c * c * std::tan(cfg.alpha_max));
}

double t_of_sigma(double sigma, const ScheduleConfig& cfg) {
  if (sigma < 0.0 || sigma > cfg.sigma_top() * (1.0 + 1e-12)) {
    throw ConfigError("t_of_sigma: sigma outside [0, sigma_data * sigma_max]");
  }
  const double t = std::atan(sigma * std::tan(cfg.alpha_max) / cfg.sigma_top()) / cfg.alpha_max;
  return t > 1.0 ? 1.0 : t;
}

Precond precond_coeffs(double sigma, const ScheduleConfig& cfg) {
  const double sd2 = cfg.sigma_data * cfg.sigma_data;
  const double s2 = sigma * sigma;
  return {sd2 / (s2 + sd2), sigma * cfg.sigma_data / std::sqrt(sd2 + s2),
          1.0 / std::sqrt(s2 + sd2), 0.25 * std::log(sigma)};
}

double loss_weight(double sigma, const ScheduleConfig& cfg) {
  const double denom = cfg.sigma_data * sigma;
  return (cfg.sigma_data * cfg.sigma_data + sigma * sigma) / (denom * denom);
}

double sigma_from_delta(double delta, const ScheduleConfig& cfg) {
  return cfg.sigma_min * std::pow(cfg.sigma_top() / cfg.sigma_min, delta);
}

double sample_train_sigma(Rng& rng, const ScheduleConfig& cfg) {
  return sigma_from_delta(rng.uniform(), cfg);
}

std::vector<double> karras_sigmas(int n, double rho, double sigma_lo, double sigma_hi) {
  if (n < 2) throw ConfigError("karras_sigmas: need at least 2 levels");
  if (!(rho > 0.0)) throw ConfigError("karras_sigmas: rho must be > 0");
  if (!(sigma_lo > 0.0 && sigma_hi > sigma_lo)) {
    throw ConfigError("karras_sigmas: need 0 < sigma_lo < sigma_hi");
  }
  const double hi = std::pow(sigma_hi, 1.0 / rho);
  const double lo = std::pow(sigma_lo, 1.0 / rho);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = std::pow(hi + double(i) / double(n - 1) * (lo - hi), rho);
  }
  out.front() = sigma_hi;
  out.back() = sigma_lo;
  return out;
}

}  // namespace seedgen
