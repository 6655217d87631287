// Copyright 2026 The rcsf Authors. All Rights Reserved.
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

// Binary soft-margin SVM with an RBF kernel.
//
// Training solves the dual
//   max  sum_i a_i - 1/2 sum_ij a_i a_j m_i m_j K(x_i, x_j)
//   s.t. 0 <= a_i <= C,  sum_i a_i m_i = 0
// by sequential minimal optimization. Each step picks the pair of multipliers
// whose prediction errors differ the most among all KKT-violating pairs and
// moves them analytically along the equality constraint, clipped to the box.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rcsf/error.hpp"
#include "rcsf/matrix.hpp"

namespace rcsf {

/// Per-dimension min/max learned from training data; maps the training range
/// onto [-1, 1]. Empty params act as the identity.
struct ScalingParams {
  std::vector<double> mins;
  std::vector<double> maxs;

  bool identity() const { return mins.empty(); }
  std::size_t dim() const { return mins.size(); }

  double apply(std::size_t d, double x) const {
    const double lo = mins[d], hi = maxs[d];
    if (hi == lo) return 0.0;
    return -1.0 + 2.0 * (x - lo) / (hi - lo);
  }

  std::vector<double> apply(std::span<const double> x) const {
    if (identity()) return {x.begin(), x.end()};
    if (x.size() != dim()) {
      throw InvalidArgument("scaling: vector has " + std::to_string(x.size()) + " dimensions, expected " +
                            std::to_string(dim()));
    }
    std::vector<double> out(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) out[d] = apply(d, x[d]);
    return out;
  }

  Matrix apply(const Matrix& rows) const {
    if (identity()) return rows;
    Matrix out(rows.rows(), rows.cols());
    for (std::size_t r = 0; r < rows.rows(); ++r) {
      const auto s = apply(rows.row(r));
      std::copy(s.begin(), s.end(), out.row(r).begin());
    }
    return out;
  }
};

inline ScalingParams fit_scaling(const Matrix& train) {
  if (train.rows() == 0 || train.cols() == 0) throw InvalidArgument("fit_scaling: empty training set");
  ScalingParams p;
  p.mins.assign(train.row(0).begin(), train.row(0).end());
  p.maxs = p.mins;
  for (std::size_t r = 1; r < train.rows(); ++r) {
    auto row = train.row(r);
    for (std::size_t d = 0; d < row.size(); ++d) {
      p.mins[d] = std::min(p.mins[d], row[d]);
      p.maxs[d] = std::max(p.maxs[d], row[d]);
    }
  }
  return p;
}

inline double squared_distance(std::span<const double> x, std::span<const double> z) {
  double acc = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double t = x[d] - z[d];
    acc += t * t;
  }
  return acc;
}

inline double rbf_kernel(std::span<const double> x, std::span<const double> z, double gamma) {
  if (x.size() != z.size()) {
    throw InvalidArgument("rbf_kernel: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                          std::to_string(z.size()) + ")");
  }
  if (!(gamma > 0.0)) throw InvalidArgument("rbf_kernel: gamma must be positive");
  return std::exp(-gamma * squared_distance(x, z));
}

/// Pairwise squared distances between the rows of a and the rows of b.
inline Matrix squared_distances(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.rows());
  const bool same = &a == &b;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = same ? i : 0; j < b.rows(); ++j) {
      const double d = squared_distance(a.row(i), b.row(j));
      out(i, j) = d;
      if (same) out(j, i) = d;
    }
  }
  return out;
}

inline Matrix rbf_from_distances(const Matrix& dist, double gamma) {
  Matrix k(dist.rows(), dist.cols());
  for (std::size_t i = 0; i < dist.rows(); ++i) {
    auto src = dist.row(i);
    auto dst = k.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = std::exp(-gamma * src[j]);
  }
  return k;
}

struct TrainConfig {
  double C = 1.0;
  double gamma = 1.0;
  double kkt_tolerance = 1e-3;
  int max_passes = 1000;  // iteration cap is max_passes * n pair updates
  int folds = 5;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(C > 0.0) || !std::isfinite(C)) throw InvalidArgument("C must be positive and finite");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be positive and finite");
    if (!(kkt_tolerance > 0.0)) throw InvalidArgument("KKT tolerance must be positive");
    if (max_passes < 1) throw InvalidArgument("max_passes must be positive");
    if (folds < 2) throw InvalidArgument("folds must be at least 2");
  }
};

/// Optional solver diagnostics.
struct SmoTrace {
  std::vector<double> objective;  // dual objective after every accepted step
  std::size_t iterations = 0;
  bool converged = false;
};

struct DualSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

inline double dual_objective(const Matrix& K, std::span<const int> y, std::span<const double> alpha) {
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    lin += alpha[i];
    if (alpha[i] == 0.0) continue;
    for (std::size_t j = 0; j < alpha.size(); ++j) quad += alpha[i] * alpha[j] * y[i] * y[j] * K(i, j);
  }
  return lin - 0.5 * quad;
}

namespace detail {

inline void check_labels(std::span<const int> y) {
  bool pos = false, neg = false;
  for (int v : y) {
    if (v == 1) {
      pos = true;
    } else if (v == -1) {
      neg = true;
    } else {
      throw InvalidArgument("labels must be +1 or -1");
    }
  }
  if (!pos || !neg) throw InvalidArgument("training data must contain both classes");
}

}  // namespace detail

/// SMO on a precomputed kernel matrix. Stops once the largest violation
/// F_up - F_low falls to kkt_tolerance (so every KKT condition holds within
/// kkt_tolerance after the final bias is chosen) or after max_passes * n steps.
inline DualSolution solve_dual(const Matrix& K, std::span<const int> y, double C, double kkt_tolerance,
                               int max_passes, SmoTrace* trace = nullptr) {
  const std::size_t n = y.size();
  if (K.rows() != n || K.cols() != n) throw InvalidArgument("solve_dual: kernel matrix shape mismatch");
  detail::check_labels(y);

  DualSolution sol;
  sol.alpha.assign(n, 0.0);
  auto& a = sol.alpha;
  // g[k] = sum_l a_l y_l K(k, l); F_k = y_k - g[k] is the bias that would put
  // sample k exactly on its margin.
  std::vector<double> g(n, 0.0);
  auto in_up = [&](std::size_t k) { return y[k] > 0 ? a[k] < C : a[k] > 0.0; };
  auto in_low = [&](std::size_t k) { return y[k] > 0 ? a[k] > 0.0 : a[k] < C; };

  const std::size_t max_iter = static_cast<std::size_t>(max_passes) * std::max<std::size_t>(n, 1);
  double f_up = 0.0, f_low = 0.0;
  std::optional<std::size_t> up, low;
  for (;;) {
    up.reset();
    low.reset();
    for (std::size_t k = 0; k < n; ++k) {
      const double f = y[k] - g[k];
      if (in_up(k) && (!up || f > f_up)) {
        up = k;
        f_up = f;
      }
      if (in_low(k) && (!low || f < f_low)) {
        low = k;
        f_low = f;
      }
    }
    if (!up || !low || f_up - f_low <= kkt_tolerance) {
      sol.converged = true;
      break;
    }
    if (sol.iterations >= max_iter) break;

    const std::size_t i = *up, j = *low;
    // Move a_i by +y_i t and a_j by -y_j t; the objective gains
    // t (F_i - F_j) - t^2 eta / 2.
    const double eta = std::max(K(i, i) + K(j, j) - 2.0 * K(i, j), 1e-12);
    const double bound_i = y[i] > 0 ? C - a[i] : a[i];
    const double bound_j = y[j] > 0 ? a[j] : C - a[j];
    double t = (f_up - f_low) / eta;
    if (t >= bound_i) t = bound_i;
    if (t >= bound_j) t = bound_j;

    a[i] = t == bound_i ? (y[i] > 0 ? C : 0.0) : a[i] + y[i] * t;
    a[j] = t == bound_j ? (y[j] > 0 ? 0.0 : C) : a[j] - y[j] * t;
    for (std::size_t k = 0; k < n; ++k) g[k] += t * (K(k, i) - K(k, j));
    ++sol.iterations;

    if (trace) {
      double lin = 0.0, quad = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        lin += a[k];
        quad += a[k] * y[k] * g[k];
      }
      trace->objective.push_back(lin - 0.5 * quad);
    }
  }

  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k] > 0.0 && a[k] < C) {
      free_sum += y[k] - g[k];
      ++free_count;
    }
  }
  if (free_count > 0) {
    sol.bias = free_sum / static_cast<double>(free_count);
  } else if (up && low) {
    sol.bias = 0.5 * (f_up + f_low);
  } else {
    sol.bias = up ? f_up : (low ? f_low : 0.0);
  }
  if (trace) {
    trace->iterations = sol.iterations;
    trace->converged = sol.converged;
  }
  return sol;
}

struct Prediction {
  int label = +1;  // +1 obscene, -1 non-obscene
  double decision_value = 0.0;
};

struct SvmModel {
  Matrix support_vectors;  // already scaled
  std::vector<double> alphas;
  std::vector<int> labels;
  double bias = 0.0;
  double gamma = 1.0;
  double C = 1.0;
  ScalingParams scaling;
  std::string feature_fingerprint;
  std::string feature_config;  // canonical FeatureConfig string, when known

  std::size_t dim() const { return support_vectors.cols(); }
  std::size_t num_support_vectors() const { return alphas.size(); }

  /// Decision value of a vector that is already in the scaled space.
  double decision_scaled(std::span<const double> x) const {
    if (x.size() != dim()) {
      throw InvalidArgument("predict: vector has " + std::to_string(x.size()) + " dimensions, model expects " +
                            std::to_string(dim()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      acc += alphas[i] * labels[i] * std::exp(-gamma * squared_distance(support_vectors.row(i), x));
    }
    return acc + bias;
  }
};

inline constexpr double kSupportVectorThreshold = 1e-8;

/// Trains on vectors that are already scaled. The returned model has identity
/// scaling; train_model() is the raw-data entry point.
inline SvmModel smo_train(const Matrix& scaled, std::span<const int> labels, const TrainConfig& cfg,
                          SmoTrace* trace = nullptr) {
  cfg.validate();
  if (scaled.rows() != labels.size()) throw InvalidArgument("smo_train: vector and label counts differ");
  detail::check_labels(labels);
  for (double v : scaled.data()) {
    if (!std::isfinite(v)) throw InvalidArgument("smo_train: non-finite feature value");
  }
  const Matrix K = rbf_from_distances(squared_distances(scaled, scaled), cfg.gamma);
  const DualSolution sol = solve_dual(K, labels, cfg.C, cfg.kkt_tolerance, cfg.max_passes, trace);

  SvmModel m;
  m.gamma = cfg.gamma;
  m.C = cfg.C;
  m.bias = sol.bias;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < sol.alpha.size(); ++i)
    if (sol.alpha[i] > kSupportVectorThreshold) keep.push_back(i);
  m.support_vectors = Matrix(keep.size(), scaled.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    auto src = scaled.row(keep[r]);
    std::copy(src.begin(), src.end(), m.support_vectors.row(r).begin());
    m.alphas.push_back(sol.alpha[keep[r]]);
    m.labels.push_back(labels[keep[r]]);
  }
  return m;
}

/// Fits scaling on raw training vectors, then trains.
inline SvmModel train_model(const Matrix& raw, std::span<const int> labels, const TrainConfig& cfg,
                            std::string feature_fingerprint = {}, SmoTrace* trace = nullptr) {
  ScalingParams scaling = fit_scaling(raw);
  SvmModel m = smo_train(scaling.apply(raw), labels, cfg, trace);
  m.scaling = std::move(scaling);
  m.feature_fingerprint = std::move(feature_fingerprint);
  return m;
}

/// Applies the model's scaling, evaluates sum a_i m_i K(x_i, x) + b and takes
/// its sign; a zero decision value counts as +1.
inline Prediction predict(const SvmModel& model, std::span<const double> raw) {
  const std::vector<double> x = model.scaling.apply(raw);
  Prediction p;
  p.decision_value = model.decision_scaled(x);
  p.label = p.decision_value >= 0.0 ? +1 : -1;
  return p;
}

inline Prediction predict(const SvmModel& model, std::span<const double> raw, const std::string& fingerprint) {
  if (!model.feature_fingerprint.empty() && fingerprint != model.feature_fingerprint) {
    throw FingerprintMismatch("model was trained on features " + model.feature_fingerprint +
                              " but the vector was extracted as " + fingerprint);
  }
  return predict(model, raw);
}

inline Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw InvalidArgument("rows_to_matrix: ragged rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

/// Stratified fold assignment: each class is shuffled with the seed and dealt
/// round-robin over the folds.
inline std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("folds must be at least 2");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] > 0 ? pos : neg).push_back(i);
  if (pos.size() < static_cast<std::size_t>(folds) || neg.size() < static_cast<std::size_t>(folds)) {
    throw InvalidArgument("cross-validation needs at least " + std::to_string(folds) +
                          " samples per class (have " + std::to_string(pos.size()) + " positive, " +
                          std::to_string(neg.size()) + " negative)");
  }
  std::mt19937_64 rng(seed);
  std::vector<int> fold(labels.size(), 0);
  int next = 0;
  for (auto* cls : {&pos, &neg}) {
    std::shuffle(cls->begin(), cls->end(), rng);
    for (std::size_t idx : *cls) {
      fold[idx] = next;
      next = (next + 1) % folds;
    }
  }
  return fold;
}

struct GridPoint {
  double C = 1.0;
  double gamma = 1.0;
};

struct GridResult {
  GridPoint point;
  double accuracy = 0.0;
};

struct GridSearchResult {
  GridPoint best;
  double best_accuracy = 0.0;
  std::vector<GridResult> evaluated;  // in grid order
};

/// C in {2^-5, 2^-3, ..., 2^15} crossed with gamma in {2^-15, 2^-13, ..., 2^3}.
inline std::vector<GridPoint> default_grid() {
  std::vector<GridPoint> g;
  for (int lc = -5; lc <= 15; lc += 2)
    for (int lg = -15; lg <= 3; lg += 2) g.push_back({std::ldexp(1.0, lc), std::ldexp(1.0, lg)});
  return g;
}

namespace detail {

struct FoldData {
  std::vector<int> train_labels;
  std::vector<int> test_labels;
  Matrix train_dist;
  Matrix test_dist;  // test rows x train rows
};

inline std::vector<FoldData> prepare_folds(const Matrix& raw, std::span<const int> labels, int folds,
                                           std::uint64_t seed) {
  const std::vector<int> assign = stratified_folds(labels, folds, seed);
  std::vector<FoldData> out(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < assign.size(); ++i) (assign[i] == f ? te : tr).push_back(i);
    Matrix xtr(tr.size(), raw.cols()), xte(te.size(), raw.cols());
    FoldData& fd = out[static_cast<std::size_t>(f)];
    for (std::size_t r = 0; r < tr.size(); ++r) {
      std::copy(raw.row(tr[r]).begin(), raw.row(tr[r]).end(), xtr.row(r).begin());
      fd.train_labels.push_back(labels[tr[r]]);
    }
    for (std::size_t r = 0; r < te.size(); ++r) {
      std::copy(raw.row(te[r]).begin(), raw.row(te[r]).end(), xte.row(r).begin());
      fd.test_labels.push_back(labels[te[r]]);
    }
    // Scaling is fit on the training part of the fold only.
    const ScalingParams sp = fit_scaling(xtr);
    const Matrix str = sp.apply(xtr);
    const Matrix ste = sp.apply(xte);
    fd.train_dist = squared_distances(str, str);
    fd.test_dist = squared_distances(ste, str);
  }
  return out;
}

inline std::size_t fold_correct(const FoldData& fd, const Matrix& k_train, double gamma, double C,
                                const TrainConfig& cfg) {
  const DualSolution sol = solve_dual(k_train, fd.train_labels, C, cfg.kkt_tolerance, cfg.max_passes);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < fd.test_labels.size(); ++r) {
    auto d = fd.test_dist.row(r);
    double acc = sol.bias;
    for (std::size_t i = 0; i < sol.alpha.size(); ++i) {
      if (sol.alpha[i] > kSupportVectorThreshold) acc += sol.alpha[i] * fd.train_labels[i] * std::exp(-gamma * d[i]);
    }
    const int pred = acc >= 0.0 ? +1 : -1;
    if (pred == fd.test_labels[r]) ++correct;
  }
  return correct;
}

}  // namespace detail

/// Evaluates every grid point by stratified k-fold cross-validation (the same
/// folds for every point) and returns the most accurate. Ties go to the
/// smaller C, then the smaller gamma.
inline GridSearchResult grid_search(const Matrix& raw, std::span<const int> labels, std::span<const GridPoint> grid,
                                    const TrainConfig& base) {
  if (grid.empty()) throw InvalidArgument("grid_search: empty grid");
  base.validate();
  if (raw.rows() != labels.size()) throw InvalidArgument("grid_search: vector and label counts differ");
  detail::check_labels(labels);
  const auto folds = detail::prepare_folds(raw, labels, base.folds, base.seed);

  std::vector<double> gammas;
  for (const auto& p : grid) {
    if (!(p.C > 0.0) || !(p.gamma > 0.0)) throw InvalidArgument("grid_search: C and gamma must be positive");
    if (std::find(gammas.begin(), gammas.end(), p.gamma) == gammas.end()) gammas.push_back(p.gamma);
  }

  GridSearchResult res;
  res.evaluated.resize(grid.size());
  std::vector<std::vector<double>> acc_per_fold(grid.size());
  for (const auto& fd : folds) {
    for (double gamma : gammas) {
      const Matrix k = rbf_from_distances(fd.train_dist, gamma);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        if (grid[g].gamma != gamma) continue;
        const std::size_t correct = detail::fold_correct(fd, k, gamma, grid[g].C, base);
        acc_per_fold[g].push_back(static_cast<double>(correct) / static_cast<double>(fd.test_labels.size()));
      }
    }
  }
  std::optional<std::size_t> best;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (double a : acc_per_fold[g]) sum += a;
    res.evaluated[g] = {grid[g], sum / static_cast<double>(acc_per_fold[g].size())};
    if (!best) {
      best = g;
      continue;
    }
    const GridResult& cur = res.evaluated[g];
    const GridResult& top = res.evaluated[*best];
    if (cur.accuracy > top.accuracy ||
        (cur.accuracy == top.accuracy &&
         (cur.point.C < top.point.C || (cur.point.C == top.point.C && cur.point.gamma < top.point.gamma)))) {
      best = g;
    }
  }
  res.best = res.evaluated[*best].point;
  res.best_accuracy = res.evaluated[*best].accuracy;
  return res;
}

/// Mean held-out accuracy of stratified k-fold cross-validation at cfg's (C, gamma).
inline double cross_validate(const Matrix& raw, std::span<const int> labels, const TrainConfig& cfg) {
  const GridPoint p{cfg.C, cfg.gamma};
  return grid_search(raw, labels, std::span<const GridPoint>(&p, 1), cfg).best_accuracy;
}

}  // namespace rcsf
