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

// Dense residual network used as the raw denoiser backbone, with
// hand-written reverse-mode gradients and an Adam optimizer.
//
// Architecture (column-batched; every matrix below holds one example per
// column):
//
//   h0   = Ws [x; cond] + bs
//   e    = silu(Wn1 c + bn1)                   c = noise feature
//   m    = Wn2 e + bn2                         (2 * width * blocks) rows
//   per block k, with (s_k, t_k) the k-th slices of m:
//     u  = h (1 + s_k) + t_k
//     a  = W1_k [u; cond] + b1_k
//     h += W2_k silu(a) + b2_k
//   y    = Wo h + bo
//
// Parameters are stored in single precision; all arithmetic runs in double.

#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace seedgen::nn {

struct NetworkSpec {
  int input_dim = 0;
  int cond_dim = 0;
  int width = 64;
  int num_blocks = 6;
  int output_dim = 0;

  // Throws ConfigError when any dimension is < 1.
  void validate() const;
  bool operator==(const NetworkSpec&) const = default;
};

void to_json(nlohmann::json& j, const NetworkSpec& spec);
void from_json(const nlohmann::json& j, NetworkSpec& spec);

// One named tensor inside the flat parameter vector. Matrices are row-major.
struct TensorSlot {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::size_t offset = 0;
  std::size_t size() const { return static_cast<std::size_t>(rows * cols); }
};

class ParamLayout {
 public:
  static ParamLayout for_spec(const NetworkSpec& spec);

  const std::vector<TensorSlot>& slots() const { return slots_; }
  const TensorSlot& find(const std::string& name) const;
  std::size_t total_size() const { return total_; }

 private:
  std::vector<TensorSlot> slots_;
  std::size_t total_ = 0;
};

struct Params {
  NetworkSpec spec;
  std::vector<float> values;  // ordered by ParamLayout::for_spec(spec)

  bool operator==(const Params&) const = default;
};

struct ParamGradients {
  std::vector<double> values;  // same layout as Params::values
};

// Fan-in scaled Gaussian weights, zero biases. The noise modulation head and
// the final projection start at zero, so a fresh network outputs zeros.
Params init_params(const NetworkSpec& spec, std::uint64_t seed);

struct Weights;

// Everything the backward pass needs from one forward pass.
struct ForwardTrace {
  std::shared_ptr<const Weights> weights;
  Eigen::MatrixXd stem_in;   // [x; cond]
  Eigen::MatrixXd cond;
  Eigen::RowVectorXd noise;  // one entry, or one per column
  Eigen::MatrixXd noise_pre;
  Eigen::MatrixXd noise_act;
  Eigen::MatrixXd modulation;
  std::vector<Eigen::MatrixXd> block_in;
  std::vector<Eigen::MatrixXd> block_mod_in;  // u
  std::vector<Eigen::MatrixXd> block_pre;     // a
  Eigen::MatrixXd head_in;
  Eigen::MatrixXd output;

  Eigen::Index batch() const { return stem_in.cols(); }
  bool shared_noise() const { return noise.size() == 1; }
};

// Immutable compute view over a Params value. Cheap to copy; forward passes
// may run concurrently on one instance.
class Network {
 public:
  explicit Network(Params params);

  const Params& params() const { return params_; }
  const NetworkSpec& spec() const { return params_.spec; }

  // x: input_dim x B, cond: cond_dim x B, noise: 1 entry (shared) or B
  // entries. Returns output_dim x B.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x,
                          const Eigen::RowVectorXd& noise,
                          const Eigen::MatrixXd& cond,
                          ForwardTrace* trace = nullptr) const;

 private:
  Params params_;
  std::shared_ptr<const Weights> weights_;
};

// Gradient of sum_b <y_b, upstream_b> with respect to the parameters.
ParamGradients grad_params(const ForwardTrace& trace, const Eigen::MatrixXd& upstream);

// Gradient of sum_b <y_b, upstream_b> with respect to x, column by column.
Eigen::MatrixXd vjp_input(const ForwardTrace& trace, const Eigen::MatrixXd& upstream);

// Single-example conveniences.
std::pair<Eigen::VectorXd, ForwardTrace> forward(const Params& params,
                                                 const Eigen::VectorXd& x,
                                                 double noise_feature,
                                                 const Eigen::VectorXd& cond);

struct OptimizerState {
  long step = 0;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static OptimizerState for_params(const Params& params);
};

// Bias-corrected Adam update in place. Rejects non-finite gradients before
// touching either argument.
void adam_step(OptimizerState& state, Params& params, const ParamGradients& grads,
               double lr);

// Linear warm-up from 0 to `peak` over `warmup` steps, then cosine decay to
// 0 at `total`.
double cosine_lr(long step, long warmup, long total, double peak);

}  // namespace seedgen::nn
