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

#include "seedgen/nn.hpp"

#include <cmath>
#include <numbers>

#include "seedgen/errors.hpp"
#include "seedgen/rng.hpp"

namespace seedgen::nn {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;
using RowMajorF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMajorD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void NetworkSpec::validate() const {
  if (input_dim < 1 || cond_dim < 1 || width < 1 || num_blocks < 1 || output_dim < 1) {
    throw ConfigError("network spec: all dimensions must be >= 1");
  }
}

void to_json(nlohmann::json& j, const NetworkSpec& spec) {
  j = {{"input_dim", spec.input_dim},
       {"cond_dim", spec.cond_dim},
       {"width", spec.width},
       {"num_blocks", spec.num_blocks},
       {"output_dim", spec.output_dim}};
}

void from_json(const nlohmann::json& j, NetworkSpec& spec) {
  j.at("input_dim").get_to(spec.input_dim);
  j.at("cond_dim").get_to(spec.cond_dim);
  j.at("width").get_to(spec.width);
  j.at("num_blocks").get_to(spec.num_blocks);
  j.at("output_dim").get_to(spec.output_dim);
}

ParamLayout ParamLayout::for_spec(const NetworkSpec& spec) {
  spec.validate();
  ParamLayout layout;
  auto add = [&layout](std::string name, Index rows, Index cols) {
    TensorSlot slot{std::move(name), rows, cols, layout.total_};
    layout.total_ += slot.size();
    layout.slots_.push_back(std::move(slot));
  };
  const Index w = spec.width;
  add("stem.w", w, spec.input_dim + spec.cond_dim);
  add("stem.b", w, 1);
  add("noise.w1", w, 1);
  add("noise.b1", w, 1);
  add("noise.w2", 2 * w * spec.num_blocks, w);
  add("noise.b2", 2 * w * spec.num_blocks, 1);
  for (int k = 0; k < spec.num_blocks; ++k) {
    const std::string p = "block" + std::to_string(k);
    add(p + ".w1", w, w + spec.cond_dim);
    add(p + ".b1", w, 1);
    add(p + ".w2", w, w);
    add(p + ".b2", w, 1);
  }
  add("out.w", spec.output_dim, w);
  add("out.b", spec.output_dim, 1);
  return layout;
}

const TensorSlot& ParamLayout::find(const std::string& name) const {
  for (const auto& slot : slots_) {
    if (slot.name == name) return slot;
  }
  throw ConfigError("unknown tensor '" + name + "'");
}

struct Weights {
  NetworkSpec spec;
  MatrixXd stem_w;
  VectorXd stem_b;
  MatrixXd noise_w1;
  VectorXd noise_b1;
  MatrixXd noise_w2;
  VectorXd noise_b2;
  struct Block {
    MatrixXd w1;
    VectorXd b1;
    MatrixXd w2;
    VectorXd b2;
  };
  std::vector<Block> blocks;
  MatrixXd out_w;
  VectorXd out_b;
};

namespace {

MatrixXd load_tensor(const Params& p, const TensorSlot& slot) {
  Eigen::Map<const RowMajorF> m(p.values.data() + slot.offset, slot.rows, slot.cols);
  return m.cast<double>();
}

std::shared_ptr<const Weights> make_weights(const Params& p) {
  const auto layout = ParamLayout::for_spec(p.spec);
  if (p.values.size() != layout.total_size()) {
    throw DataError("params: expected " + std::to_string(layout.total_size()) +
                    " values, got " + std::to_string(p.values.size()));
  }
  auto w = std::make_shared<Weights>();
  w->spec = p.spec;
  auto get = [&](const std::string& name) { return load_tensor(p, layout.find(name)); };
  w->stem_w = get("stem.w");
  w->stem_b = get("stem.b");
  w->noise_w1 = get("noise.w1");
  w->noise_b1 = get("noise.b1");
  w->noise_w2 = get("noise.w2");
  w->noise_b2 = get("noise.b2");
  for (int k = 0; k < p.spec.num_blocks; ++k) {
    const std::string pre = "block" + std::to_string(k);
    w->blocks.push_back({get(pre + ".w1"), get(pre + ".b1"), get(pre + ".w2"), get(pre + ".b2")});
  }
  w->out_w = get("out.w");
  w->out_b = get("out.b");
  return w;
}

inline double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

MatrixXd silu(const MatrixXd& a) {
  return a.unaryExpr([](double v) { return v * sigmoid(v); });
}

MatrixXd silu_grad(const MatrixXd& a) {
  return a.unaryExpr([](double v) {
    const double s = sigmoid(v);
    return s * (1.0 + v * (1.0 - s));
  });
}

// Broadcast a single modulation column across the batch when noise is shared.
auto mod_rows(const MatrixXd& mod, Index row, Index count, Index batch) {
  if (mod.cols() == 1) return MatrixXd(mod.block(row, 0, count, 1).replicate(1, batch));
  return MatrixXd(mod.middleRows(row, count));
}

void store(std::vector<double>& flat, const TensorSlot& slot, const MatrixXd& m) {
  Eigen::Map<RowMajorD>(flat.data() + slot.offset, slot.rows, slot.cols) = m;
}

}  // namespace

Params init_params(const NetworkSpec& spec, std::uint64_t seed) {
  const auto layout = ParamLayout::for_spec(spec);
  Params p{spec, std::vector<float>(layout.total_size(), 0.0f)};
  Rng rng(seed);
  auto fill = [&](const std::string& name, double stddev) {
    const auto& slot = layout.find(name);
    for (std::size_t i = 0; i < slot.size(); ++i) {
      p.values[slot.offset + i] = static_cast<float>(stddev * rng.normal());
    }
  };
  fill("stem.w", 1.0 / std::sqrt(double(spec.input_dim + spec.cond_dim)));
  fill("noise.w1", 1.0);
  for (int k = 0; k < spec.num_blocks; ++k) {
    const std::string pre = "block" + std::to_string(k);
    fill(pre + ".w1", 1.0 / std::sqrt(double(spec.width + spec.cond_dim)));
    // 1/sqrt(num_blocks) residual scaling.
    fill(pre + ".w2", 1.0 / std::sqrt(double(spec.width) * spec.num_blocks));
  }
  return p;
}

Network::Network(Params params) : params_(std::move(params)), weights_(make_weights(params_)) {}

MatrixXd Network::forward(const MatrixXd& x, const RowVectorXd& noise, const MatrixXd& cond,
                          ForwardTrace* trace) const {
  const Weights& w = *weights_;
  const NetworkSpec& spec = w.spec;
  const Index batch = x.cols();
  if (x.rows() != spec.input_dim || cond.rows() != spec.cond_dim || cond.cols() != batch) {
    throw ConfigError("forward: input/cond dimension mismatch");
  }
  if (noise.size() != 1 && noise.size() != batch) {
    throw ConfigError("forward: noise feature count must be 1 or the batch size");
  }

  MatrixXd stem_in(spec.input_dim + spec.cond_dim, batch);
  stem_in << x, cond;
  MatrixXd h = (w.stem_w * stem_in).colwise() + w.stem_b;

  MatrixXd noise_pre = (w.noise_w1 * noise).colwise() + w.noise_b1;
  MatrixXd noise_act = silu(noise_pre);
  MatrixXd mod = (w.noise_w2 * noise_act).colwise() + w.noise_b2;

  if (trace) {
    trace->weights = weights_;
    trace->stem_in = stem_in;
    trace->cond = cond;
    trace->noise = noise;
    trace->noise_pre = noise_pre;
    trace->noise_act = noise_act;
    trace->block_in.clear();
    trace->block_mod_in.clear();
    trace->block_pre.clear();
  }

  const Index width = spec.width;
  MatrixXd block_in_buf(width + spec.cond_dim, batch);
  for (int k = 0; k < spec.num_blocks; ++k) {
    const auto& blk = w.blocks[k];
    const MatrixXd scale = mod_rows(mod, 2 * k * width, width, batch);
    const MatrixXd shift = mod_rows(mod, (2 * k + 1) * width, width, batch);
    MatrixXd u = h.cwiseProduct((scale.array() + 1.0).matrix()) + shift;
    block_in_buf << u, cond;
    MatrixXd a = (blk.w1 * block_in_buf).colwise() + blk.b1;
    MatrixXd v = (blk.w2 * silu(a)).colwise() + blk.b2;
    if (trace) {
      trace->block_in.push_back(h);
      trace->block_mod_in.push_back(std::move(u));
      trace->block_pre.push_back(std::move(a));
    }
    h += v;
  }
  MatrixXd y = (w.out_w * h).colwise() + w.out_b;
  if (trace) {
    trace->modulation = std::move(mod);
    trace->head_in = std::move(h);
    trace->output = y;
  }
  return y;
}

namespace {

// Shared reverse pass. Parameter gradients are skipped when `grads` is null.
MatrixXd backward(const ForwardTrace& tr, const MatrixXd& upstream, std::vector<double>* grads) {
  if (!tr.weights) throw ConfigError("backward: empty trace");
  const Weights& w = *tr.weights;
  const NetworkSpec& spec = w.spec;
  const Index batch = tr.batch();
  if (upstream.rows() != spec.output_dim || upstream.cols() != batch) {
    throw ConfigError("backward: upstream does not match the traced output");
  }
  std::unique_ptr<ParamLayout> layout;
  if (grads) {
    layout = std::make_unique<ParamLayout>(ParamLayout::for_spec(spec));
    grads->assign(layout->total_size(), 0.0);
    store(*grads, layout->find("out.w"), upstream * tr.head_in.transpose());
    store(*grads, layout->find("out.b"), upstream.rowwise().sum());
  }

  const Index width = spec.width;
  MatrixXd dh = w.out_w.transpose() * upstream;
  MatrixXd dmod;
  if (grads) dmod = MatrixXd::Zero(tr.modulation.rows(), batch);

  for (int k = spec.num_blocks - 1; k >= 0; --k) {
    const auto& blk = w.blocks[k];
    const MatrixXd& a = tr.block_pre[k];
    const MatrixXd& u = tr.block_mod_in[k];
    const MatrixXd dr = blk.w2.transpose() * dh;
    const MatrixXd da = dr.cwiseProduct(silu_grad(a));
    const MatrixXd din = blk.w1.transpose() * da;
    const auto du = din.topRows(width);
    const MatrixXd scale = mod_rows(tr.modulation, 2 * k * width, width, batch);

    if (grads) {
      const std::string pre = "block" + std::to_string(k);
      MatrixXd block_in(width + spec.cond_dim, batch);
      block_in << u, tr.cond;
      store(*grads, layout->find(pre + ".w2"), dh * silu(a).transpose());
      store(*grads, layout->find(pre + ".b2"), dh.rowwise().sum());
      store(*grads, layout->find(pre + ".w1"), da * block_in.transpose());
      store(*grads, layout->find(pre + ".b1"), da.rowwise().sum());
      dmod.middleRows(2 * k * width, width) = du.cwiseProduct(tr.block_in[k]);
      dmod.middleRows((2 * k + 1) * width, width) = du;
    }
    dh = dh + du.cwiseProduct((scale.array() + 1.0).matrix());
  }

  if (grads) {
    // A shared noise feature means every column used the same modulation.
    MatrixXd dmod_eff = tr.shared_noise() ? MatrixXd(dmod.rowwise().sum()) : dmod;
    store(*grads, layout->find("noise.w2"), dmod_eff * tr.noise_act.transpose());
    store(*grads, layout->find("noise.b2"), dmod_eff.rowwise().sum());
    const MatrixXd de = (w.noise_w2.transpose() * dmod_eff).cwiseProduct(silu_grad(tr.noise_pre));
    store(*grads, layout->find("noise.w1"), de * tr.noise.transpose());
    store(*grads, layout->find("noise.b1"), de.rowwise().sum());
    store(*grads, layout->find("stem.w"), dh * tr.stem_in.transpose());
    store(*grads, layout->find("stem.b"), dh.rowwise().sum());
  }
  return (w.stem_w.transpose() * dh).topRows(spec.input_dim);
}

}  // namespace

ParamGradients grad_params(const ForwardTrace& trace, const MatrixXd& upstream) {
  ParamGradients g;
  backward(trace, upstream, &g.values);
  return g;
}

MatrixXd vjp_input(const ForwardTrace& trace, const MatrixXd& upstream) {
  return backward(trace, upstream, nullptr);
}

std::pair<VectorXd, ForwardTrace> forward(const Params& params, const VectorXd& x,
                                          double noise_feature, const VectorXd& cond) {
  Network net(params);
  ForwardTrace trace;
  RowVectorXd noise(1);
  noise(0) = noise_feature;
  MatrixXd y = net.forward(x, noise, cond, &trace);
  return {y.col(0), std::move(trace)};
}

OptimizerState OptimizerState::for_params(const Params& params) {
  OptimizerState s;
  s.first_moment.assign(params.values.size(), 0.0);
  s.second_moment.assign(params.values.size(), 0.0);
  return s;
}

void adam_step(OptimizerState& state, Params& params, const ParamGradients& grads, double lr) {
  const std::size_t n = params.values.size();
  if (grads.values.size() != n || state.first_moment.size() != n || state.second_moment.size() != n) {
    throw ConfigError("adam_step: gradient/moment/parameter sizes disagree");
  }
  if (!(lr > 0.0)) throw ConfigError("adam_step: learning rate must be > 0");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(grads.values[i])) {
      throw NumericError("adam_step: non-finite gradient at index " + std::to_string(i),
                         state.step);
    }
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, double(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, double(state.step));
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads.values[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g * g;
    const double update = lr * (m / c1) / (std::sqrt(v / c2) + state.epsilon);
    params.values[i] = static_cast<float>(params.values[i] - update);
  }
}

double cosine_lr(long step, long warmup, long total, double peak) {
  if (warmup < 0 || total < 0 || warmup > total) {
    throw ConfigError("cosine_lr: need 0 <= warmup <= total");
  }
  if (step < 0 || step > total) throw ConfigError("cosine_lr: step outside [0, total]");
  if (step < warmup) return peak * double(step) / double(warmup);
  if (total == warmup) return peak;
  const double progress = double(step - warmup) / double(total - warmup);
  return 0.5 * peak * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace seedgen::nn
