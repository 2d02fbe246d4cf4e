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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lenp/dataset.hpp"
#include "lenp/errors.hpp"

namespace lenp {

// One concept predicate, possibly negated: x_j(x) = [x_j > theta].
struct Literal {
  int feature = 0;
  bool negated = false;

  bool holds(const ConceptVector& x, double theta = kPredicateThreshold) const {
    return concept_true(x.at(static_cast<std::size_t>(feature)), theta) != negated;
  }

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal& a, const Literal& b) {
    if (auto c = a.feature <=> b.feature; c != 0) return c;
    return a.negated <=> b.negated;
  }
};

// Sorts by (feature, polarity) and drops duplicates. A feature occurring with
// both polarities is a contradiction and is rejected.
inline std::vector<Literal> canonicalize(std::vector<Literal> literals) {
  std::sort(literals.begin(), literals.end());
  literals.erase(std::unique(literals.begin(), literals.end()), literals.end());
  for (std::size_t i = 1; i < literals.size(); ++i) {
    if (literals[i].feature == literals[i - 1].feature) {
      throw UsageError("contradictory conjunction on feature " +
                       std::to_string(literals[i].feature));
    }
  }
  return literals;
}

// AND of literals in canonical order. The empty conjunction is vacuous: it
// evaluates to true on every input.
class Conjunction {
 public:
  Conjunction() = default;
  explicit Conjunction(std::vector<Literal> literals) : literals_(canonicalize(std::move(literals))) {}

  const std::vector<Literal>& literals() const { return literals_; }
  std::size_t size() const { return literals_.size(); }
  bool vacuous() const { return literals_.empty(); }

  bool evaluate(const ConceptVector& x, double theta = kPredicateThreshold) const {
    for (const auto& lit : literals_) {
      if (!lit.holds(x, theta)) return false;
    }
    return true;
  }

  std::vector<int> features() const {
    std::vector<int> out;
    out.reserve(literals_.size());
    for (const auto& lit : literals_) out.push_back(lit.feature);
    return out;
  }

  friend bool operator==(const Conjunction&, const Conjunction&) = default;
  friend auto operator<=>(const Conjunction& a, const Conjunction& b) {
    return a.literals_ <=> b.literals_;
  }

 private:
  std::vector<Literal> literals_;
};

// OR of conjunctions; clause order is preserved, exact duplicates dropped.
// The empty DNF evaluates to false.
class Dnf {
 public:
  Dnf() = default;
  explicit Dnf(std::vector<Conjunction> clauses) {
    for (auto& c : clauses) add(std::move(c));
  }

  void add(Conjunction clause) {
    if (std::find(clauses_.begin(), clauses_.end(), clause) == clauses_.end()) {
      clauses_.push_back(std::move(clause));
    }
  }

  const std::vector<Conjunction>& clauses() const { return clauses_; }
  std::size_t size() const { return clauses_.size(); }
  bool empty() const { return clauses_.empty(); }

  bool evaluate(const ConceptVector& x, double theta = kPredicateThreshold) const {
    for (const auto& clause : clauses_) {
      if (clause.evaluate(x, theta)) return true;
    }
    return false;
  }

  // Mentions the feature as a literal of the given polarity (or either).
  bool mentions(int feature, std::optional<bool> negated = std::nullopt) const {
    for (const auto& clause : clauses_) {
      for (const auto& lit : clause.literals()) {
        if (lit.feature == feature && (!negated || lit.negated == *negated)) return true;
      }
    }
    return false;
  }

  friend bool operator==(const Dnf&, const Dnf&) = default;

 private:
  std::vector<Conjunction> clauses_;
};

// Counts canonical conjunctions; this is the mu operator over the local
// explanations of one class.
class FrequencyTable {
 public:
  void add(const Conjunction& clause, std::size_t count = 1) { counts_[clause] += count; }

  std::size_t count(const Conjunction& clause) const {
    auto it = counts_.find(clause);
    return it == counts_.end() ? 0 : it->second;
  }

  std::size_t distinct() const { return counts_.size(); }
  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& [c, n] : counts_) t += n;
    return t;
  }

  const std::map<Conjunction, std::size_t>& entries() const { return counts_; }

 private:
  std::map<Conjunction, std::size_t> counts_;
};

// ---------------------------------------------------------------------------
// Accuracy scoring and rendering.
// ---------------------------------------------------------------------------

// Fraction of examples where the formula's truth value equals the class label.
template <typename Formula>
double formula_accuracy(const Formula& f, const Dataset& ds, std::size_t cls,
                        double theta = kPredicateThreshold) {
  if (ds.size() == 0) throw UsageError("formula_accuracy: empty dataset");
  std::size_t correct = 0;
  for (const auto& ex : ds.examples) {
    if (f.evaluate(ex.concepts, theta) == ex.has_label(cls)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

inline std::string to_string(const Literal& lit, const Vocabulary& vocab) {
  std::string out = lit.negated ? "¬" : "";
  return out + vocab.term(lit.feature);
}

inline std::string to_string(const Conjunction& c, const Vocabulary& vocab) {
  if (c.vacuous()) return "⊤";  // top: the vacuous conjunction
  std::string out;
  for (std::size_t i = 0; i < c.literals().size(); ++i) {
    if (i > 0) out += " ∧ ";
    out += to_string(c.literals()[i], vocab);
  }
  return out;
}

inline std::string to_string(const Dnf& f, const Vocabulary& vocab) {
  if (f.empty()) return "⊥";  // bottom: the empty disjunction
  if (f.size() == 1) return to_string(f.clauses().front(), vocab);
  std::string out;
  for (std::size_t i = 0; i < f.clauses().size(); ++i) {
    if (i > 0) out += " ∨ ";
    out += "(" + to_string(f.clauses()[i], vocab) + ")";
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON serialization: {"clauses": [[{"f": id, "neg": bool}, ...], ...]}.
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const Conjunction& c) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& lit : c.literals()) {
    arr.push_back({{"f", lit.feature}, {"neg", lit.negated}});
  }
  return arr;
}

inline nlohmann::json to_json(const Dnf& f) {
  nlohmann::json clauses = nlohmann::json::array();
  for (const auto& c : f.clauses()) clauses.push_back(to_json(c));
  return {{"clauses", clauses}};
}

inline Conjunction conjunction_from_json(const nlohmann::json& arr) {
  std::vector<Literal> lits;
  for (const auto& j : arr) {
    lits.push_back(Literal{j.at("f").get<int>(), j.at("neg").get<bool>()});
  }
  return Conjunction(std::move(lits));
}

inline Dnf dnf_from_json(const nlohmann::json& j) {
  std::vector<Conjunction> clauses;
  for (const auto& arr : j.at("clauses")) clauses.push_back(conjunction_from_json(arr));
  return Dnf(std::move(clauses));
}

}  // namespace lenp
