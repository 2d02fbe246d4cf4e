// Copyright 2026 The Authors.
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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "lenp/dataset.hpp"
#include "lenp/errors.hpp"
#include "lenp/rng.hpp"

namespace lenp {

// Local linear surrogate: sparse signed weights over concept features.
struct WeightExplanation {
  std::size_t cls = 0;
  double prediction = 0.0;
  std::map<int, double> weights;
  double intercept = 0.0;
  std::size_t n_samples = 0;
  double kernel_width = 0.0;

  // Dense weight vector, absent features at zero.
  std::vector<double> dense(std::size_t dim) const {
    std::vector<double> v(dim, 0.0);
    for (const auto& [f, w] : weights) v[static_cast<std::size_t>(f)] = w;
    return v;
  }
};

struct SurrogateConfig {
  std::size_t n_samples = 1000;
  double kernel_width = 0.0;  // 0 = auto: 0.75 * sqrt(d)
  std::size_t top_features = 10;
  double ridge = 1e-3;
  bool discretized = true;    // zero active features vs. add noise + binarize
  double noise_scale = 1.0;   // non-discretized mode only
  std::uint64_t seed = 0;

  void validate() const {
    if (n_samples < 10) throw UsageError("surrogate: n_samples must be at least 10");
    if (top_features < 1) throw UsageError("surrogate: top_features must be at least 1");
    if (ridge < 0 || kernel_width < 0 || noise_scale <= 0) {
      throw UsageError("surrogate: invalid configuration");
    }
  }
};

namespace detail {

// Solves A x = b in place by Gaussian elimination with partial pivoting.
// Returns false when a pivot collapses (singular system).
inline bool solve_linear(std::vector<std::vector<double>>& a, std::vector<double>& b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-12) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return true;
}

template <typename Predict>
bool surrogate_fit_once(Predict& predict, const ConceptVector& x, std::size_t cls,
                        const SurrogateConfig& cfg, std::size_t n_samples, Rng rng,
                        WeightExplanation& out) {
  const std::size_t d = x.size();
  const double kw = cfg.kernel_width > 0 ? cfg.kernel_width
                                         : 0.75 * std::sqrt(static_cast<double>(d));

  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < d; ++j) {
    if (concept_true(x[j])) active.push_back(j);
  }

  // Row 0 is the unperturbed input; the rest are random local perturbations.
  std::vector<ConceptVector> points;
  points.reserve(n_samples);
  points.push_back(x);
  for (std::size_t s = 1; s < n_samples; ++s) {
    ConceptVector y = x;
    if (cfg.discretized) {
      for (std::size_t j : active) {
        if (rng.bernoulli(0.5)) y[j] = 0.0;
      }
    } else {
      for (std::size_t j = 0; j < d; ++j) {
        y[j] = concept_true(x[j] + rng.uniform(-cfg.noise_scale, cfg.noise_scale)) ? 1.0 : 0.0;
      }
    }
    points.push_back(std::move(y));
  }

  // Only columns that vary across the sample influence the fit; constant
  // columns would get an exact zero weight from the penalized solve anyway.
  std::vector<std::size_t> varying;
  for (std::size_t j = 0; j < d; ++j) {
    const double first = points[0][j];
    for (const auto& p : points) {
      if (p[j] != first) {
        varying.push_back(j);
        break;
      }
    }
  }

  const std::size_t m = varying.size() + 1;  // + intercept
  std::vector<std::vector<double>> ata(m, std::vector<double>(m, 0.0));
  std::vector<double> atb(m, 0.0);
  std::vector<double> row(m, 1.0);  // trailing slot holds the intercept's 1
  for (const auto& p : points) {
    double dist2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = p[j] - x[j];
      dist2 += diff * diff;
    }
    const double w = std::exp(-dist2 / (kw * kw));
    for (std::size_t j = 0; j < varying.size(); ++j) row[j] = p[varying[j]];
    const double target = predict(p)[cls];
    for (std::size_t a = 0; a < m; ++a) {
      const double wa = w * row[a];
      atb[a] += wa * target;
      for (std::size_t b = a; b < m; ++b) ata[a][b] += wa * row[b];
    }
  }
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < a; ++b) ata[a][b] = ata[b][a];
  }
  for (std::size_t j = 0; j + 1 < m; ++j) ata[j][j] += cfg.ridge;  // intercept unpenalized

  if (!solve_linear(ata, atb)) return false;
  for (double v : atb) {
    if (!std::isfinite(v)) return false;
  }

  out.cls = cls;
  out.prediction = predict(x)[cls];
  out.intercept = atb[m - 1];
  out.n_samples = n_samples;
  out.kernel_width = kw;
  out.weights.clear();

  std::vector<std::pair<int, double>> ranked;
  for (std::size_t j = 0; j < varying.size(); ++j) {
    ranked.emplace_back(static_cast<int>(varying[j]), atb[j]);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (std::abs(a.second) != std::abs(b.second)) return std::abs(a.second) > std::abs(b.second);
    return a.first < b.first;
  });
  if (ranked.size() > cfg.top_features) ranked.resize(cfg.top_features);
  for (const auto& [f, w] : ranked) out.weights[f] = w;
  return true;
}

}  // namespace detail

// LIME-style local explanation of any predict-probability model: perturb
// around x, fit a distance-weighted ridge regression to the class
// probability, keep the heaviest features. One retry with a larger sample on
// a degenerate design, then the failure is reported.
template <typename Predict>
WeightExplanation surrogate_local(Predict&& predict, const ConceptVector& x, std::size_t cls,
                                  const SurrogateConfig& cfg = {}) {
  cfg.validate();
  WeightExplanation out;
  Rng rng = Rng(cfg.seed).split("surrogate");
  if (detail::surrogate_fit_once(predict, x, cls, cfg, cfg.n_samples, rng, out)) return out;
  Rng retry = Rng(cfg.seed).split("surrogate-retry");
  if (detail::surrogate_fit_once(predict, x, cls, cfg, cfg.n_samples * 2, retry, out)) return out;
  throw NumericalError("surrogate: degenerate design matrix, even after resampling");
}

struct SubmodularPick {
  std::vector<std::size_t> selected;        // sample indices, pick order
  std::map<int, double> importance;         // per-feature total |weight| mass
  double coverage = 0.0;                    // mass covered by the selection
};

// Greedy max-coverage selection of representative samples: every feature
// carries its total |weight| mass across explanations, and each pick adds the
// mass of the features it newly covers. Ties go to the lower sample index.
inline SubmodularPick submodular_pick(const std::vector<WeightExplanation>& explanations,
                                      std::size_t budget) {
  SubmodularPick out;
  for (const auto& e : explanations) {
    for (const auto& [f, w] : e.weights) out.importance[f] += std::abs(w);
  }
  std::set<int> covered;
  std::vector<bool> used(explanations.size(), false);
  const std::size_t picks = std::min(budget, explanations.size());
  for (std::size_t round = 0; round < picks; ++round) {
    double best_gain = -1.0;
    std::size_t best = explanations.size();
    for (std::size_t i = 0; i < explanations.size(); ++i) {
      if (used[i]) continue;
      double gain = 0.0;
      for (const auto& [f, w] : explanations[i].weights) {
        if (w != 0.0 && !covered.contains(f)) gain += out.importance[f];
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best == explanations.size()) break;
    used[best] = true;
    out.selected.push_back(best);
    out.coverage += best_gain;
    for (const auto& [f, w] : explanations[best].weights) {
      if (w != 0.0) covered.insert(f);
    }
  }
  return out;
}

}  // namespace lenp
