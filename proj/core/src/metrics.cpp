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

#include "seedgen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "seedgen/errors.hpp"

namespace seedgen {

using Eigen::MatrixXd;
using Eigen::VectorXd;

GaussianMoments moments(const MatrixXd& vectors) {
  if (vectors.cols() < 2) throw ConfigError("moments: need at least 2 vectors");
  GaussianMoments m;
  m.sample_count = static_cast<std::size_t>(vectors.cols());
  m.mean = vectors.rowwise().mean();
  const MatrixXd centered = vectors.colwise() - m.mean;
  m.covariance = centered * centered.transpose() / double(vectors.cols() - 1);
  m.covariance = 0.5 * (m.covariance + m.covariance.transpose()).eval();
  return m;
}

SymmetricEigen symmetric_eigen(const MatrixXd& input, double tolerance, int max_sweeps) {
  if (input.rows() != input.cols()) throw ConfigError("symmetric_eigen: matrix must be square");
  const Eigen::Index n = input.rows();
  MatrixXd a = 0.5 * (input + input.transpose());
  MatrixXd v = MatrixXd::Identity(n, n);
  const double scale = std::max(a.norm(), 1e-300);
  auto off_norm = [&a, n]() {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    }
    return std::sqrt(s);
  };

  SymmetricEigen out;
  for (; out.sweeps < max_sweeps && off_norm() > tolerance * scale; ++out.sweeps) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that zeroes a(p, q); the smaller root keeps it stable.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&a](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[std::size_t(i)], order[std::size_t(i)]);
    out.vectors.col(i) = v.col(order[std::size_t(i)]);
  }
  return out;
}

MatrixXd psd_sqrt(const MatrixXd& m) {
  if (m.rows() != m.cols()) throw ConfigError("psd_sqrt: matrix must be square");
  const double tol = 1e-6 * std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) throw ConfigError("psd_sqrt: matrix is not symmetric");
  const SymmetricEigen eig = symmetric_eigen(m);
  const VectorXd root = eig.values.cwiseMax(0.0).cwiseSqrt();
  MatrixXd out = eig.vectors * root.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (out + out.transpose());
}

double fmd(const GaussianMoments& g, const GaussianMoments& r) {
  if (g.mean.size() != r.mean.size()) throw ConfigError("fmd: dimension mismatch");
  const MatrixXd root_g = psd_sqrt(g.covariance);
  const MatrixXd inner = root_g * r.covariance * root_g;
  const SymmetricEigen eig = symmetric_eigen(0.5 * (inner + inner.transpose()));
  const double trace_root = eig.values.cwiseMax(0.0).cwiseSqrt().sum();
  const double value = (g.mean - r.mean).squaredNorm() + g.covariance.trace() + r.covariance.trace() -
                       2.0 * trace_root;
  return std::max(value, 0.0);
}

double fmd(const MatrixXd& generated, const GaussianMoments& reference) {
  if (generated.rows() != reference.mean.size()) throw ConfigError("fmd: dimension mismatch");
  return fmd(moments(generated), reference);
}

double miscs(const MatrixXd& vectors) {
  const Eigen::Index n = vectors.cols();
  if (n < 2) throw ConfigError("miscs: need at least 2 vectors");
  // Plain loops: a blocked GEMM may accumulate different entries in
  // different orders, and identical columns must give identical dots.
  MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (Eigen::Index r = 0; r < vectors.rows(); ++r) acc += vectors(r, i) * vectors(r, j);
      gram(i, j) = acc;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(gram(i, i) > 0.0)) throw ConfigError("miscs: zero vector");
  }
  double total = 0.0;
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      // sqrt(x * x) == x in IEEE arithmetic, so identical columns score 1.
      total += gram(i, j) / std::sqrt(gram(i, i) * gram(j, j));
    }
  }
  return 2.0 * total / (double(n) * double(n - 1));
}

namespace {

double mean_dot(const MatrixXd& a, const MatrixXd& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ConfigError(std::string(what) + ": length or dimension mismatch");
  }
  if (a.cols() == 0) throw ConfigError(std::string(what) + ": empty input");
  return a.cwiseProduct(b).colwise().sum().mean();
}

}  // namespace

double alignment_m2m(const MatrixXd& predicted, const MatrixXd& ground_truth) {
  return mean_dot(predicted, ground_truth, "alignment_m2m");
}

double alignment_m2c(const MatrixXd& predicted, const MatrixXd& captions) {
  return mean_dot(predicted, captions, "alignment_m2c");
}

double alignment_m2i(const MatrixXd& predicted, const MatrixXd& images, const MatrixXd& text_query,
                     const MatrixXd& text_target) {
  if (text_query.cols() == 0 || text_query.cols() != text_target.cols()) {
    throw ConfigError("alignment_m2i: empty or mismatched proxy set");
  }
  if (predicted.cols() != images.cols() || predicted.cols() == 0) {
    throw ConfigError("alignment_m2i: predictions and images must pair up");
  }
  if (images.rows() != text_query.rows() || predicted.rows() != text_target.rows()) {
    throw ConfigError("alignment_m2i: dimension mismatch");
  }
  const MatrixXd image_text = images.transpose() * text_query;      // n x T
  const MatrixXd music_text = predicted.transpose() * text_target;  // n x T
  return image_text.cwiseProduct(music_text).mean();
}

double triplet_accuracy(const MatrixXd& pred, const MatrixXd& pos, const MatrixXd& neg) {
  if (pred.cols() == 0) throw ConfigError("triplet_accuracy: no triplets");
  if (pos.cols() != pred.cols() || neg.cols() != pred.cols() || pos.rows() != pred.rows() ||
      neg.rows() != pred.rows()) {
    throw ConfigError("triplet_accuracy: shape mismatch");
  }
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < pred.cols(); ++i) {
    if (pred.col(i).dot(pos.col(i)) >= pred.col(i).dot(neg.col(i))) ++hits;
  }
  return double(hits) / double(pred.cols());
}

double entropy_at_k(std::span<const int> genres, int num_genres) {
  if (genres.empty()) throw ConfigError("entropy_at_k: K must be >= 1");
  std::vector<int> counts(static_cast<std::size_t>(num_genres), 0);
  for (int g : genres) {
    if (g < 0 || g >= num_genres) throw ConfigError("entropy_at_k: genre label out of range");
    ++counts[std::size_t(g)];
  }
  const double k = double(genres.size());
  double h = 0.0;
  for (int c : counts) {
    if (c == 0) continue;
    const double p = double(c) / k;
    h -= p * std::log(p);
  }
  return h;
}

std::optional<double> recall_at_k(std::span<const std::size_t> ranked,
                                  std::span<const std::size_t> relevant, int k) {
  if (k < 1) throw ConfigError("recall_at_k: K must be >= 1");
  const std::unordered_set<std::size_t> rel(relevant.begin(), relevant.end());
  if (rel.empty()) return std::nullopt;
  const std::size_t depth = std::min(ranked.size(), std::size_t(k));
  std::unordered_set<std::size_t> found;
  for (std::size_t i = 0; i < depth; ++i) {
    if (rel.count(ranked[i])) found.insert(ranked[i]);
  }
  return double(found.size()) / double(rel.size());
}

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json j = {{"v", 1},
                      {"model_kind", r.model_kind},
                      {"fmd", r.fmd},
                      {"miscs", r.miscs},
                      {"triplet_accuracy", r.triplet_accuracy},
                      {"queries", r.queries},
                      {"samples_per_query", r.samples_per_query},
                      {"recall_excluded", r.recall_excluded}};
  if (r.omega) j["omega"] = *r.omega;
  if (r.m2i) j["m2i"] = *r.m2i;
  if (r.m2m) j["m2m"] = *r.m2m;
  if (r.m2c) j["m2c"] = *r.m2c;
  for (const auto& [k, v] : r.entropy_at) j["entropy@" + std::to_string(k)] = v;
  for (const auto& [k, v] : r.recall_at) j["recall@" + std::to_string(k)] = v;
  return j;
}

}  // namespace seedgen
