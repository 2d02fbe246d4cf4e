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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lenp/dataset.hpp"
#include "lenp/errors.hpp"
#include "lenp/explain.hpp"
#include "lenp/metrics.hpp"
#include "lenp/model.hpp"
#include "lenp/parallel.hpp"
#include "lenp/surrogate.hpp"

namespace lenp {

using PredictFn = std::function<std::vector<double>(const ConceptVector&)>;

struct EvalRow {
  std::size_t sample_id = 0;
  std::string strategy;  // len | lenp | surrogate
  double auc_morf = 0.0;
  double max_sens = 0.0;
};

struct EvalConfig {
  std::size_t n_samples = 100;       // inputs to explain
  std::size_t m = 10;                // MoRF steps per input
  double radius = 0.02;
  std::size_t n_perturbations = 10;  // sensitivity draws per input
  bool with_surrogate = true;
  SurrogateConfig surrogate;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct EvalSummary {
  std::vector<EvalRow> rows;
  std::map<std::string, MeanCi> auc;                       // per strategy
  std::map<std::string, MeanCi> sens;                      // per strategy
  std::map<std::string, std::vector<double>> mean_curves;  // per strategy, m+1 points
};

// Scores every explanation strategy on the same inputs against the same
// predictor. `predict` is the model being explained (a black box or the LEN
// itself); `model` supplies the logic explanations and must be a distillation
// of `predict` when the two differ.
inline EvalSummary evaluate_explanations(const EntropyLenModel& model, const PredictFn& predict,
                                         const Dataset& ds, const EvalConfig& cfg) {
  if (ds.size() == 0) throw UsageError("eval: empty dataset");
  if (cfg.m < 1) throw UsageError("eval: m must be >= 1");
  const std::size_t n = std::min(cfg.n_samples, ds.size());
  const std::size_t dim = ds.dim();

  struct PerSample {
    std::vector<EvalRow> rows;
    std::map<std::string, std::vector<double>> curves;
  };

  auto one = [&](std::size_t i) {
    const ConceptVector& x = ds.examples[i].concepts;
    const std::vector<double> probs = predict(x);
    std::size_t cls = 0;
    for (std::size_t c = 1; c < probs.size(); ++c) {
      if (probs[c] > probs[cls]) cls = c;
    }
    const std::vector<double> alpha_tilde = model.alpha_scores(cls).alpha_tilde;
    const std::uint64_t sens_seed = Rng(cfg.seed).split("eval-sens", i).next_u64();

    PerSample out;
    {
      LocalExplanation e = len_local(model, x, cls);
      MorfCurve curve = morf_curve(predict, x, cls, ranking_from_logic(e.good, alpha_tilde,
                                                                       cfg.m, "len"));
      const double sens = max_sensitivity(
          [&](const ConceptVector& y) { return len_local(model, y, cls); }, x, cfg.radius,
          cfg.n_perturbations, sens_seed, dim);
      out.rows.push_back({i, "len", auc_morf(curve), sens});
      out.curves["len"] = std::move(curve.values);
    }
    {
      LocalExplanation e = lenp_local(model, x, cls);
      MorfCurve curve = morf_curve(predict, x, cls, ranking_from_logic(e.good, alpha_tilde,
                                                                       cfg.m, "lenp"));
      const double sens = max_sensitivity(
          [&](const ConceptVector& y) { return lenp_local(model, y, cls); }, x, cfg.radius,
          cfg.n_perturbations, sens_seed, dim);
      out.rows.push_back({i, "lenp", auc_morf(curve), sens});
      out.curves["lenp"] = std::move(curve.values);
    }
    if (cfg.with_surrogate) {
      SurrogateConfig scfg = cfg.surrogate;
      scfg.seed = Rng(cfg.seed).split("eval-surrogate", i).next_u64();
      WeightExplanation e = surrogate_local(predict, x, cls, scfg);
      MorfCurve curve = morf_curve(predict, x, cls, ranking_from_weights(e, dim, cfg.m));
      const double sens = max_sensitivity(
          [&](const ConceptVector& y) { return surrogate_local(predict, y, cls, scfg); }, x,
          cfg.radius, cfg.n_perturbations, sens_seed, dim);
      out.rows.push_back({i, "surrogate", auc_morf(curve), sens});
      out.curves["surrogate"] = std::move(curve.values);
    }
    return out;
  };

  const std::vector<PerSample> per_sample = parallel_map(n, cfg.threads, one);

  EvalSummary summary;
  std::map<std::string, std::vector<double>> auc_values, sens_values;
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> curve_sums;
  for (const auto& ps : per_sample) {
    for (const auto& row : ps.rows) {
      summary.rows.push_back(row);
      auc_values[row.strategy].push_back(row.auc_morf);
      sens_values[row.strategy].push_back(row.max_sens);
    }
    for (const auto& [name, curve] : ps.curves) {
      auto& [sum, count] = curve_sums[name];
      sum.resize(std::max(sum.size(), curve.size()), 0.0);
      for (std::size_t k = 0; k < curve.size(); ++k) sum[k] += curve[k];
      ++count;
    }
  }
  for (const auto& [name, values] : auc_values) summary.auc[name] = mean_ci(values);
  for (const auto& [name, values] : sens_values) summary.sens[name] = mean_ci(values);
  for (auto& [name, sum_count] : curve_sums) {
    auto& [sum, count] = sum_count;
    for (double& v : sum) v /= static_cast<double>(count);
    summary.mean_curves[name] = sum;
  }
  return summary;
}

}  // namespace lenp
