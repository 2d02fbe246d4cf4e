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
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lenp/dataset.hpp"
#include "lenp/errors.hpp"
#include "lenp/explain.hpp"
#include "lenp/metrics.hpp"
#include "lenp/parallel.hpp"
#include "lenp/surrogate.hpp"
#include "lenp/synthetic.hpp"
#include "lenp/tokenizer.hpp"
#include "lenp/train.hpp"

namespace lenp {

struct BiasSetting {
  std::string name = "S1";
  std::size_t noise_count = 2;
  double p_target = 0.30;
  double p_other = 0.05;
  double f1_gap_threshold = 0.03;

  void validate() const {
    if (p_target <= p_other) throw UsageError("bias: p_target must exceed p_other");
    if (f1_gap_threshold <= 0) throw UsageError("bias: gap threshold must be positive");
    if (noise_count < 1) throw UsageError("bias: noise count must be >= 1");
  }
};

inline BiasSetting bias_setting_s1() { return {"S1", 2, 0.30, 0.05, 0.03}; }
inline BiasSetting bias_setting_s2() { return {"S2", 2, 0.35, 0.05, 0.05}; }

struct BiasConfig {
  TagsSpec corpus;                 // per-trial seed is overridden
  TrainConfig train;               // per-trial seed is overridden
  SurrogateConfig surrogate;
  SplitFractions fractions{0.7, 0.15, 0.15};
  std::size_t max_features = 200;
  std::size_t min_doc_freq = 2;
  double max_doc_freq = 1.0;  // fraction; < 1 prunes near-constant terms
  int target_class = 0;
  std::size_t k = 10;                  // candidate clauses per aggregation
  std::size_t explain_samples = 40;    // local surrogate fits for the global pick
  std::size_t pick_budget = 10;
  std::size_t retry_cap = 50;
  // When false (default) a noisy feature only counts as exposed by a logic
  // explanation when it appears as a positive literal: a negated literal says
  // the model keys on the feature's absence, which is the opposite of the
  // planted shortcut.
  bool detection_counts_negated = false;
};

struct DetectionRecord {
  std::uint64_t trial_seed = 0;
  std::uint64_t accepted_seed = 0;
  std::size_t attempts = 0;
  bool biased = false;
  double f1_val = 0.0;
  double f1_test = 0.0;
  bool detected_len = false;
  bool detected_lenp = false;
  bool detected_surrogate = false;
  std::string formula_len;
  std::string formula_lenp;
  std::vector<int> surrogate_top;
};

namespace detail {

inline bool logic_detects(const Dnf& formula, const std::vector<int>& noisy_ids,
                          bool count_negated) {
  for (int id : noisy_ids) {
    if (count_negated ? formula.mentions(id) : formula.mentions(id, false)) return true;
  }
  return false;
}

// Top-n features by aggregate importance, descending; ties to the lower id.
inline std::vector<int> importance_top(const std::map<int, double>& importance, std::size_t n) {
  std::vector<std::pair<int, double>> items(importance.begin(), importance.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<int> out;
  for (const auto& [f, w] : items) {
    if (out.size() >= n) break;
    out.push_back(f);
  }
  return out;
}

}  // namespace detail

// One bias experiment: grow a corpus, plant noisy features correlated with
// the target class on the train/validation side only, train, and accept the
// run once the validation-test F1 gap certifies the model picked the shortcut
// up. Then ask each global-explanation strategy whether it exposes a planted
// feature. Unbiased attempts are re-rolled with a fresh seed up to the cap.
inline DetectionRecord run_bias_trial(const BiasSetting& setting, const BiasConfig& config,
                                      std::uint64_t trial_seed) {
  setting.validate();
  DetectionRecord record;
  record.trial_seed = trial_seed;

  for (std::size_t attempt = 0; attempt < config.retry_cap; ++attempt) {
    const std::uint64_t seed = Rng(trial_seed).split("bias-attempt", attempt).next_u64();
    record.attempts = attempt + 1;

    TagsSpec corpus_spec = config.corpus;
    corpus_spec.seed = seed;
    auto docs = make_tags_corpus(corpus_spec);
    std::vector<std::vector<std::string>> token_docs;
    token_docs.reserve(docs.size());
    for (const auto& d : docs) token_docs.push_back(tokenize(d.text));
    Dataset ds = make_dataset(docs, build_vocabulary(token_docs, config.max_features,
                                                     config.min_doc_freq, config.max_doc_freq),
                              tag_class_names(corpus_spec.n_classes));

    auto [train_ds, val_ds, test_ds] = split(ds, config.fractions, seed);
    const std::size_t n_train = train_ds.size();

    NoiseSpec noise;
    noise.count = setting.noise_count;
    noise.p_target = setting.p_target;
    noise.p_other = setting.p_other;
    noise.target_class = config.target_class;
    noise.seed = seed;
    // Validation rows get train-style (correlated) noise; test rows do not.
    NoiseInjection inj = inject_noise_features(concat(train_ds, val_ds), test_ds, noise);
    Dataset train_noised = inj.train;
    train_noised.examples.resize(n_train);
    Dataset val_noised = inj.train;
    val_noised.examples.erase(val_noised.examples.begin(),
                              val_noised.examples.begin() + static_cast<std::ptrdiff_t>(n_train));

    TrainConfig train_cfg = config.train;
    train_cfg.seed = seed;
    EntropyLenModel model = train(train_noised, train_cfg);
    const auto predict = [&model](const ConceptVector& x) { return model.forward(x); };

    const auto target = static_cast<std::size_t>(config.target_class);
    record.f1_val = class_f1(predict, val_noised, target);
    record.f1_test = class_f1(predict, inj.test, target);
    record.biased = record.f1_val - record.f1_test >= setting.f1_gap_threshold;
    if (!record.biased) continue;
    record.accepted_seed = seed;

    GlobalExplanation len_global = global_explain(model, train_noised, val_noised, target,
                                                  LocalMode::kLen, AggregationMode::kGreedy,
                                                  config.k);
    GlobalExplanation lenp_global = global_explain(model, train_noised, val_noised, target,
                                                   LocalMode::kLenp, AggregationMode::kPowerset,
                                                   config.k);
    record.formula_len = to_string(len_global.formula, train_noised.vocabulary);
    record.formula_lenp = to_string(lenp_global.formula, train_noised.vocabulary);
    record.detected_len =
        detail::logic_detects(len_global.formula, inj.noisy_ids, config.detection_counts_negated);
    record.detected_lenp =
        detail::logic_detects(lenp_global.formula, inj.noisy_ids, config.detection_counts_negated);

    // Weight baseline: local surrogate fits over predicted-positive samples,
    // aggregated by the submodular pick; it exposes the bias when a noisy id
    // lands in the top-importance set sized like the logic formula above.
    std::vector<WeightExplanation> fits;
    for (std::size_t i = 0; i < train_noised.size() && fits.size() < config.explain_samples;
         ++i) {
      const auto& x = train_noised.examples[i].concepts;
      if (model.forward_class(x, target) < model.theta()) continue;
      SurrogateConfig scfg = config.surrogate;
      scfg.seed = Rng(seed).split("bias-surrogate", i).next_u64();
      fits.push_back(surrogate_local(predict, x, target, scfg));
    }
    SubmodularPick pick = submodular_pick(fits, config.pick_budget);
    std::set<int> formula_features;
    for (const auto& clause : lenp_global.formula.clauses()) {
      for (int f : clause.features()) formula_features.insert(f);
    }
    record.surrogate_top = detail::importance_top(pick.importance, formula_features.size());
    record.detected_surrogate =
        std::any_of(inj.noisy_ids.begin(), inj.noisy_ids.end(), [&](int id) {
          return std::find(record.surrogate_top.begin(), record.surrogate_top.end(), id) !=
                 record.surrogate_top.end();
        });
    return record;
  }
  return record;  // biased == false: no acceptable run within the cap
}

struct BiasSuiteResult {
  BiasSetting setting;
  std::vector<DetectionRecord> records;
  std::size_t biased_runs = 0;
  MeanCi rate_len;
  MeanCi rate_lenp;
  MeanCi rate_surrogate;
};

// n_trials independent experiments; rates are computed over the biased runs
// only. Trials are deterministic per (base_seed, index) and safe to run on
// several threads.
inline BiasSuiteResult run_bias_suite(const BiasSetting& setting, const BiasConfig& config,
                                      std::size_t n_trials, std::uint64_t base_seed,
                                      std::size_t threads = 1) {
  if (n_trials < 1) throw UsageError("bias: n_trials must be >= 1");
  BiasSuiteResult out;
  out.setting = setting;
  out.records = parallel_map(n_trials, threads, [&](std::size_t i) {
    return run_bias_trial(setting, config, Rng(base_seed).split("bias-trial", i).next_u64());
  });

  std::vector<double> len_hits, lenp_hits, surrogate_hits;
  for (const auto& r : out.records) {
    if (!r.biased) continue;
    ++out.biased_runs;
    len_hits.push_back(r.detected_len ? 1.0 : 0.0);
    lenp_hits.push_back(r.detected_lenp ? 1.0 : 0.0);
    surrogate_hits.push_back(r.detected_surrogate ? 1.0 : 0.0);
  }
  out.rate_len = mean_ci(len_hits);
  out.rate_lenp = mean_ci(lenp_hits);
  out.rate_surrogate = mean_ci(surrogate_hits);
  return out;
}

}  // namespace lenp
