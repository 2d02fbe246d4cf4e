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
#include <set>
#include <string>
#include <vector>

#include "lenp/dataset.hpp"
#include "lenp/errors.hpp"
#include "lenp/explain.hpp"
#include "lenp/rng.hpp"
#include "lenp/surrogate.hpp"

namespace lenp {

// Feature ids ordered by descending relevance; the ranking a MoRF pass
// destroys first.
struct RelevanceRanking {
  std::vector<std::size_t> features;
  std::string provenance;  // len | lenp | surrogate
};

namespace detail {

// Descending by score; equal scores fall back to the lower feature id.
inline std::vector<std::size_t> order_by_score(const std::vector<double>& score) {
  std::vector<std::size_t> ids(score.size());
  for (std::size_t j = 0; j < ids.size(); ++j) ids[j] = j;
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  });
  return ids;
}

}  // namespace detail

// Ranking for a logic explanation: the formula's own features first (by gate
// strength), then the remaining features by gate strength, truncated to m.
inline RelevanceRanking ranking_from_logic(const Conjunction& formula,
                                           const std::vector<double>& alpha_tilde, std::size_t m,
                                           std::string provenance) {
  if (m < 1) throw UsageError("ranking: m must be at least 1");
  m = std::min(m, alpha_tilde.size());
  std::set<std::size_t> in_formula;
  for (int f : formula.features()) in_formula.insert(static_cast<std::size_t>(f));

  RelevanceRanking out;
  out.provenance = std::move(provenance);
  const auto order = detail::order_by_score(alpha_tilde);
  for (std::size_t j : order) {
    if (out.features.size() >= m) break;
    if (in_formula.contains(j)) out.features.push_back(j);
  }
  for (std::size_t j : order) {
    if (out.features.size() >= m) break;
    if (!in_formula.contains(j)) out.features.push_back(j);
  }
  return out;
}

// Ranking for a weight explanation: |weight| descending over all features
// (absent features weigh zero), truncated to m.
inline RelevanceRanking ranking_from_weights(const WeightExplanation& e, std::size_t dim,
                                             std::size_t m) {
  if (m < 1) throw UsageError("ranking: m must be at least 1");
  m = std::min(m, dim);
  std::vector<double> score = e.dense(dim);
  for (double& s : score) s = std::abs(s);
  RelevanceRanking out;
  out.provenance = "surrogate";
  out.features = detail::order_by_score(score);
  out.features.resize(m);
  return out;
}

// Class probability after 0..m most-relevant-first binary flips.
struct MorfCurve {
  std::vector<double> values;  // length m + 1; values[0] is the unperturbed input

  std::size_t steps() const { return values.empty() ? 0 : values.size() - 1; }
};

template <typename Predict>
MorfCurve morf_curve(Predict&& predict, const ConceptVector& x, std::size_t cls,
                     const RelevanceRanking& ranking) {
  if (ranking.features.empty()) throw UsageError("morf: empty ranking");
  std::set<std::size_t> seen;
  for (std::size_t f : ranking.features) {
    if (f >= x.size()) throw UsageError("morf: feature id out of range");
    if (!seen.insert(f).second) throw UsageError("morf: duplicate feature in ranking");
  }
  MorfCurve curve;
  ConceptVector y = x;
  curve.values.push_back(predict(y)[cls]);
  for (std::size_t f : ranking.features) {
    y[f] = concept_true(y[f]) ? 0.0 : 1.0;
    curve.values.push_back(predict(y)[cls]);
  }
  return curve;
}

// Normalized area under the MoRF curve. The first segment (original input to
// first flip) is excluded; a single-step curve scores its one perturbed value.
inline double auc_morf(const MorfCurve& curve) {
  const std::size_t m = curve.steps();
  if (m == 0) throw UsageError("auc: curve has no perturbation steps");
  if (m == 1) return curve.values[1];
  double sum = 0.0;
  for (std::size_t k = 2; k <= m; ++k) {
    sum += (curve.values[k - 1] + curve.values[k]) / 2.0;
  }
  return sum / static_cast<double>(m - 1);
}

// ---------------------------------------------------------------------------
// Explanation embeddings and max-sensitivity.
// ---------------------------------------------------------------------------

// Logic explanations embed as a signed indicator over the vocabulary.
inline std::vector<double> embed(const LocalExplanation& e, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  for (const auto& lit : e.good.literals()) {
    v[static_cast<std::size_t>(lit.feature)] = lit.negated ? -1.0 : 1.0;
  }
  return v;
}

inline std::vector<double> embed(const WeightExplanation& e, std::size_t dim) {
  return e.dense(dim);
}

// Worst explanation drift under small input perturbations: the maximum
// euclidean distance between the embedded explanation at x and at any of
// n_perturbations points drawn uniformly from the radius-ball around x
// (clipped to [0,1]^d). Draw i is a fixed function of (seed, i), so sample
// sets nest as n grows.
template <typename Explainer>
double max_sensitivity(Explainer&& explain, const ConceptVector& x, double radius,
                       std::size_t n_perturbations, std::uint64_t seed, std::size_t dim) {
  if (radius <= 0) throw UsageError("sensitivity: radius must be positive");
  const std::vector<double> base = embed(explain(x), dim);
  double worst = 0.0;
  for (std::size_t i = 0; i < n_perturbations; ++i) {
    Rng rng = Rng(seed).split("sensitivity", i);
    ConceptVector y = x;
    for (double& v : y) {
      v = std::clamp(v + radius * rng.uniform(-1.0, 1.0), 0.0, 1.0);
    }
    const std::vector<double> moved = embed(explain(y), dim);
    double dist2 = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double diff = moved[j] - base[j];
      dist2 += diff * diff;
    }
    worst = std::max(worst, std::sqrt(dist2));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Multi-label model quality, micro-averaged at threshold 0.5.
// ---------------------------------------------------------------------------

struct MultilabelScores {
  double f1 = 0.0;
  double jaccard = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

template <typename Predict>
MultilabelScores multilabel_scores(Predict&& predict, const Dataset& ds) {
  if (ds.size() == 0) throw UsageError("scores: empty dataset");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& ex : ds.examples) {
    const std::vector<double> p = predict(ex.concepts);
    for (std::size_t c = 0; c < ds.n_classes(); ++c) {
      const bool hat = p[c] >= 0.5;
      const bool truth = ex.has_label(c);
      if (hat && truth) ++tp;
      if (hat && !truth) ++fp;
      if (!hat && truth) ++fn;
    }
  }
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  MultilabelScores s;
  s.precision = ratio(tp, tp + fp);
  s.recall = ratio(tp, tp + fn);
  s.f1 = s.precision + s.recall == 0.0 ? 0.0
                                       : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  s.jaccard = ratio(tp, tp + fp + fn);
  return s;
}

// Binary F1 of one class at threshold 0.5 (used by the bias gate).
template <typename Predict>
double class_f1(Predict&& predict, const Dataset& ds, std::size_t cls) {
  if (ds.size() == 0) throw UsageError("scores: empty dataset");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& ex : ds.examples) {
    const bool hat = predict(ex.concepts)[cls] >= 0.5;
    const bool truth = ex.has_label(cls);
    if (hat && truth) ++tp;
    if (hat && !truth) ++fp;
    if (!hat && truth) ++fn;
  }
  if (2 * tp + fp + fn == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

// Mean with a normal-approximation 95% confidence half-width.
struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t n = 0;
};

inline MeanCi mean_ci(const std::vector<double>& values) {
  MeanCi out;
  out.n = values.size();
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  out.half_width = 1.96 * sd / std::sqrt(static_cast<double>(values.size()));
  return out;
}

}  // namespace lenp
