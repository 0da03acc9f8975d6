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

// Tangent variance-exploding noise schedule, EDM preconditioning and the
// Karras solver levels.

#pragma once

#include <vector>

#include <nlohmann/json.hpp>

namespace seedgen {

class Rng;

struct ScheduleConfig {
  double sigma_data = 0.088;
  double alpha_max = 1.5;
  double sigma_max = 100.0;
  double sigma_min = 1e-4;

  void validate() const;
  // sigma(1) = sigma_data * sigma_max, the top of the schedule.
  double sigma_top() const { return sigma_data * sigma_max; }
  double clamp(double sigma) const { return sigma < sigma_min ? sigma_min : sigma; }
};

void to_json(nlohmann::json& j, const ScheduleConfig& c);
void from_json(const nlohmann::json& j, ScheduleConfig& c);

// sigma(t) = sigma_data * sigma_max * tan(alpha_max t) / tan(alpha_max).
// Unclamped: sigma_of_t(0) == 0.
double sigma_of_t(double t, const ScheduleConfig& cfg);
double sigma_dot(double t, const ScheduleConfig& cfg);
// Exact inverse of sigma_of_t on [0, sigma_top].
double t_of_sigma(double sigma, const ScheduleConfig& cfg);

struct Precond {
  double c_skip;
  double c_out;
  double c_in;
  double c_noise;
};

Precond precond_coeffs(double sigma, const ScheduleConfig& cfg);

// EDM weighting; loss_weight * c_out^2 == 1.
double loss_weight(double sigma, const ScheduleConfig& cfg);

// Log-uniform training noise level on [sigma_min, sigma_top]:
// sigma_min * (sigma_top / sigma_min)^delta.
double sigma_from_delta(double delta, const ScheduleConfig& cfg);
double sample_train_sigma(Rng& rng, const ScheduleConfig& cfg);

// Levels (hi^(1/rho) + i/(n-1) (lo^(1/rho) - hi^(1/rho)))^rho, i = 0..n-1.
std::vector<double> karras_sigmas(int n, double rho, double sigma_lo, double sigma_hi);

}  // namespace seedgen
