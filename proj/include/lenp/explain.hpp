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
#include <string>
#include <utility>
#include <vector>

#include "lenp/dataset.hpp"
#include "lenp/errors.hpp"
#include "lenp/logic.hpp"
#include "lenp/model.hpp"

namespace lenp {

enum class LocalMode { kLen, kLenp };
enum class AggregationMode { kGreedy, kPowerset };

inline const char* to_string(LocalMode m) { return m == LocalMode::kLen ? "len" : "lenp"; }
inline const char* to_string(AggregationMode m) {
  return m == AggregationMode::kGreedy ? "greedy" : "powerset";
}

struct LocalExplanation {
  std::size_t cls = 0;
  double prediction = 0.0;
  Conjunction good;                // literals that support the prediction
  std::vector<Literal> bad;        // literals whose removal would not hurt
  bool perturbation_checked = false;
};

// First-order local explanation: one literal per relevant feature, polarity
// taken from the input's truth value.
inline LocalExplanation len_local(const EntropyLenModel& model, const ConceptVector& x,
                                  std::size_t cls, bool use_raw_alpha = false) {
  if (x.size() != model.dim()) throw UsageError("explain: input dimension mismatch");
  LocalExplanation out;
  out.cls = cls;
  out.prediction = model.forward_class(x, cls);
  std::vector<Literal> lits;
  for (int j : model.relevant_features(cls, use_raw_alpha)) {
    lits.push_back(Literal{j, !concept_true(x[static_cast<std::size_t>(j)])});
  }
  out.good = Conjunction(std::move(lits));
  return out;
}

// Perturbation-refined local explanation: each candidate literal is kept only
// if flipping its feature's truth value lowers the class activation. Literals
// whose flip does not lower it contribute nothing and are reported as bad.
// The flip comparison runs on the binarized clone of the input, so the split
// depends on the input only through its predicates: perturbations that stay
// on one side of theta cannot change it.
inline LocalExplanation lenp_local(const EntropyLenModel& model, const ConceptVector& x,
                                   std::size_t cls, bool use_raw_alpha = false) {
  LocalExplanation base = len_local(model, x, cls, use_raw_alpha);
  LocalExplanation out;
  out.cls = cls;
  out.prediction = base.prediction;
  out.perturbation_checked = true;

  ConceptVector probe(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) probe[j] = binarize(x[j]);
  const double org = model.forward_class(probe, cls);

  std::vector<Literal> good;
  for (const Literal& lit : base.good.literals()) {
    const auto j = static_cast<std::size_t>(lit.feature);
    const double saved = probe[j];
    probe[j] = concept_true(x[j]) ? 0.0 : 1.0;
    const double perturbed = model.forward_class(probe, cls);
    probe[j] = saved;
    if (org <= perturbed) {
      out.bad.push_back(lit);
    } else {
      good.push_back(lit);
    }
  }
  out.good = Conjunction(std::move(good));
  return out;
}

inline LocalExplanation local_explain(const EntropyLenModel& model, const ConceptVector& x,
                                      std::size_t cls, LocalMode mode,
                                      bool use_raw_alpha = false) {
  return mode == LocalMode::kLen ? len_local(model, x, cls, use_raw_alpha)
                                 : lenp_local(model, x, cls, use_raw_alpha);
}

// Counts canonical local conjunctions over the samples the model itself
// predicts positive for the class. Vacuous conjunctions are skipped.
inline FrequencyTable collect_frequencies(const EntropyLenModel& model, const Dataset& ds,
                                          std::size_t cls, LocalMode mode,
                                          bool use_raw_alpha = false) {
  FrequencyTable table;
  for (const auto& ex : ds.examples) {
    if (model.forward_class(ex.concepts, cls) < model.theta()) continue;
    LocalExplanation e = local_explain(model, ex.concepts, cls, mode, use_raw_alpha);
    if (e.good.vacuous()) continue;
    table.add(e.good);
  }
  return table;
}

// Most frequent conjunctions; ties resolved by canonical conjunction order.
inline std::vector<std::pair<Conjunction, std::size_t>> top_conjunctions(
    const FrequencyTable& table, std::size_t k) {
  std::vector<std::pair<Conjunction, std::size_t>> items(table.entries().begin(),
                                                         table.entries().end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (items.size() > k) items.resize(k);
  return items;
}

struct GlobalExplanation {
  Dnf formula;
  double accuracy = 0.0;
  std::vector<std::pair<Conjunction, std::size_t>> candidates;
};

// Greedy aggregation: one scan in frequency order, keeping a clause only if
// it strictly improves validation accuracy. O(k * n) formula evaluations.
inline GlobalExplanation aggregate_greedy(
    const std::vector<std::pair<Conjunction, std::size_t>>& candidates, const Dataset& ds,
    std::size_t cls) {
  GlobalExplanation out;
  out.candidates = candidates;
  double best = formula_accuracy(out.formula, ds, cls);
  for (const auto& [clause, count] : candidates) {
    Dnf trial = out.formula;
    trial.add(clause);
    const double acc = formula_accuracy(trial, ds, cls);
    if (acc > best) {
      out.formula = std::move(trial);
      best = acc;
    }
  }
  out.accuracy = best;
  return out;
}

namespace detail {

// Canonical order on clause sets, for deterministic tie-breaking.
inline bool dnf_less(const Dnf& a, const Dnf& b) {
  std::vector<Conjunction> ca = a.clauses();
  std::vector<Conjunction> cb = b.clauses();
  std::sort(ca.begin(), ca.end());
  std::sort(cb.begin(), cb.end());
  return std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end());
}

}  // namespace detail

// Exhaustive aggregation over every subset of the candidate clauses. Picks
// the highest validation accuracy; ties prefer fewer clauses, then canonical
// clause order. Cost is O(2^k * n), so k is hard-capped.
inline GlobalExplanation aggregate_powerset(
    const std::vector<std::pair<Conjunction, std::size_t>>& candidates, const Dataset& ds,
    std::size_t cls) {
  constexpr std::size_t kMaxCandidates = 20;
  if (candidates.size() > kMaxCandidates) {
    throw UsageError("aggregate: power-set search over " + std::to_string(candidates.size()) +
                     " clauses is O(2^k * n); at most " + std::to_string(kMaxCandidates) +
                     " candidates are supported");
  }
  GlobalExplanation out;
  out.candidates = candidates;
  const std::size_t k = candidates.size();
  const double empty_acc = formula_accuracy(Dnf{}, ds, cls);

  // The empty subset is the baseline. A non-empty subset displaces the
  // current best when it scores strictly higher, or ties it — zero clauses
  // would otherwise win every tie and erase the explanation. The empty
  // formula therefore survives only when it is strictly best or every
  // subset scores the same.
  double best_acc = empty_acc;
  Dnf best_formula;
  bool best_is_empty = true;
  bool all_equal = true;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
    Dnf trial;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (std::uint64_t{1} << i)) trial.add(candidates[i].first);
    }
    const double acc = formula_accuracy(trial, ds, cls);
    if (acc != empty_acc) all_equal = false;
    bool take = acc > best_acc;
    if (!take && acc == best_acc) {
      take = best_is_empty || trial.size() < best_formula.size() ||
             (trial.size() == best_formula.size() && detail::dnf_less(trial, best_formula));
    }
    if (take) {
      best_acc = acc;
      best_formula = std::move(trial);
      best_is_empty = false;
    }
  }
  if (all_equal) {
    out.formula = Dnf{};
    out.accuracy = empty_acc;
    return out;
  }
  out.formula = std::move(best_formula);
  out.accuracy = best_acc;
  return out;
}

// End-to-end class-level explanation: collect local conjunctions on one
// split, keep the k most frequent, and aggregate against a validation split.
inline GlobalExplanation global_explain(const EntropyLenModel& model, const Dataset& collect_ds,
                                        const Dataset& validation_ds, std::size_t cls,
                                        LocalMode mode, AggregationMode agg, std::size_t k = 10,
                                        bool use_raw_alpha = false) {
  FrequencyTable table = collect_frequencies(model, collect_ds, cls, mode, use_raw_alpha);
  auto candidates = top_conjunctions(table, k);
  return agg == AggregationMode::kGreedy ? aggregate_greedy(candidates, validation_ds, cls)
                                         : aggregate_powerset(candidates, validation_ds, cls);
}

}  // namespace lenp
