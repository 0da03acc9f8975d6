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

// Embedding quality, alignment, diversity and retrieval metrics.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace seedgen {

struct GaussianMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // symmetric, denominator n - 1
  std::size_t sample_count = 0;
};

// vectors: d x n, n >= 2.
GaussianMoments moments(const Eigen::MatrixXd& vectors);

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns are eigenvectors
  int sweeps = 0;
};

// Cyclic Jacobi. Stops when the off-diagonal Frobenius norm drops below
// `tolerance` times the Frobenius norm of the input, or after `max_sweeps`.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m, double tolerance = 1e-10,
                               int max_sweeps = 100);

// Principal square root of a symmetric PSD matrix; negative eigenvalues are
// clamped to zero. Throws ConfigError for asymmetric input.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

// ||mu_g - mu_r||^2 + tr(S_g + S_r - 2 (S_g S_r)^(1/2)), clamped at 0.
double fmd(const GaussianMoments& generated, const GaussianMoments& reference);
double fmd(const Eigen::MatrixXd& generated, const GaussianMoments& reference);

// Mean pairwise cosine similarity. Identical inputs give exactly 1.
double miscs(const Eigen::MatrixXd& vectors);

// Mean <pred_i, truth_i>.
double alignment_m2m(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& ground_truth);
double alignment_m2c(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& captions);

// Mean over (image, text) of <image, text_query> * <pred(image), text_target>.
// text_query: query_dim x T, text_target: target_dim x T.
double alignment_m2i(const Eigen::MatrixXd& predicted_for_images, const Eigen::MatrixXd& images,
                     const Eigen::MatrixXd& text_query, const Eigen::MatrixXd& text_target);

// Fraction of columns with <pred, pos> >= <pred, neg>.
double triplet_accuracy(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& pos,
                        const Eigen::MatrixXd& neg);

// Natural-log entropy of the genre histogram of K labels in [0, num_genres).
double entropy_at_k(std::span<const int> genres, int num_genres);

// Relevant items found in the first K ranked entries over the number of
// relevant items; nullopt when nothing is relevant.
std::optional<double> recall_at_k(std::span<const std::size_t> ranked,
                                  std::span<const std::size_t> relevant, int k);

struct MetricsReport {
  std::string model_kind;
  std::optional<double> omega;
  double fmd = 0.0;
  double miscs = 0.0;
  std::optional<double> m2i;
  std::optional<double> m2m;
  std::optional<double> m2c;
  double triplet_accuracy = 0.0;
  std::map<int, double> entropy_at;
  std::map<int, double> recall_at;
  std::size_t queries = 0;
  std::size_t samples_per_query = 0;
  std::size_t recall_excluded = 0;
};

// Flat document: {"v":1, "fmd":..., "entropy@10":..., "recall@10":..., ...}.
nlohmann::json to_json(const MetricsReport& report);

}  // namespace seedgen
