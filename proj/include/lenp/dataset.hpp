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
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "lenp/errors.hpp"
#include "lenp/rng.hpp"
#include "lenp/tokenizer.hpp"
#include "lenp/vocabulary.hpp"

namespace lenp {

// A point of the LEN input space: length-d vector with entries in [0, 1].
// The j-th predicate is true iff values[j] > 0.5.
using ConceptVector = std::vector<double>;

constexpr double kPredicateThreshold = 0.5;

inline bool concept_true(double value, double theta = kPredicateThreshold) {
  return value > theta;
}

inline double binarize(double value, double theta = kPredicateThreshold) {
  return concept_true(value, theta) ? 1.0 : 0.0;
}

struct LabeledExample {
  ConceptVector concepts;
  std::vector<std::uint8_t> labels;  // one bit per class
  std::string raw_text;              // empty when unavailable

  bool has_label(std::size_t cls) const { return labels.at(cls) != 0; }
};

struct Dataset {
  std::vector<LabeledExample> examples;
  Vocabulary vocabulary;
  std::vector<std::string> class_names;

  std::size_t size() const { return examples.size(); }
  std::size_t dim() const { return vocabulary.size(); }
  std::size_t n_classes() const { return class_names.size(); }

  int class_id(const std::string& name) const {
    auto it = std::find(class_names.begin(), class_names.end(), name);
    return it == class_names.end() ? -1 : static_cast<int>(it - class_names.begin());
  }

  void validate() const {
    if (class_names.empty()) throw UsageError("dataset: needs at least one class");
    for (const auto& ex : examples) {
      if (ex.concepts.size() != dim()) throw UsageError("dataset: concept width mismatch");
      if (ex.labels.size() != n_classes()) throw UsageError("dataset: label width mismatch");
    }
  }
};

// ---------------------------------------------------------------------------
// JSON-lines ingestion: one {"text": ..., "labels": [...]} object per line.
// ---------------------------------------------------------------------------

struct RawDocument {
  std::string text;
  std::vector<std::string> labels;
};

inline std::vector<RawDocument> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open dataset file: " + path);
  std::vector<RawDocument> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("text") || !j.contains("labels")) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected {\"text\", \"labels\"}");
    }
    RawDocument doc;
    doc.text = j["text"].get<std::string>();
    for (const auto& l : j["labels"]) doc.labels.push_back(l.get<std::string>());
    docs.push_back(std::move(doc));
  }
  if (docs.empty()) throw UsageError("empty dataset file: " + path);
  return docs;
}

inline void write_jsonl(const std::vector<RawDocument>& docs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write dataset file: " + path);
  for (const auto& doc : docs) {
    nlohmann::json j{{"text", doc.text}, {"labels", doc.labels}};
    out << j.dump() << "\n";
  }
}

// The vocabulary's external form is a plain JSON array of terms.
inline void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write vocabulary file: " + path);
  out << nlohmann::json(vocab.terms()).dump(2) << "\n";
}

inline Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open vocabulary file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": malformed JSON: " + e.what());
  }
  if (!j.is_array()) throw UsageError(path + ": expected a JSON array of terms");
  Vocabulary vocab;
  for (const auto& term : j) vocab.append(term.get<std::string>());
  return vocab;
}

// Class names are the distinct labels in first-seen order unless given.
inline Dataset make_dataset(const std::vector<RawDocument>& docs, const Vocabulary& vocab,
                            std::vector<std::string> class_names = {}) {
  Dataset ds;
  ds.vocabulary = vocab;
  if (class_names.empty()) {
    for (const auto& doc : docs) {
      for (const auto& label : doc.labels) {
        if (std::find(class_names.begin(), class_names.end(), label) == class_names.end()) {
          class_names.push_back(label);
        }
      }
    }
  }
  ds.class_names = std::move(class_names);
  if (ds.class_names.empty()) throw UsageError("make_dataset: no labels in corpus");

  for (const auto& doc : docs) {
    LabeledExample ex;
    ex.raw_text = doc.text;
    ex.concepts = encode(tokenize(doc.text), vocab);
    ex.labels.assign(ds.n_classes(), 0);
    for (const auto& label : doc.labels) {
      int cls = ds.class_id(label);
      if (cls >= 0) ex.labels[static_cast<std::size_t>(cls)] = 1;
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

inline Dataset load_dataset(const std::string& path, std::size_t max_features,
                            std::size_t min_doc_freq = 1) {
  auto docs = read_jsonl(path);
  std::vector<std::vector<std::string>> token_docs;
  token_docs.reserve(docs.size());
  for (const auto& doc : docs) token_docs.push_back(tokenize(doc.text));
  Vocabulary vocab = build_vocabulary(token_docs, max_features, min_doc_freq);
  return make_dataset(docs, vocab);
}

// ---------------------------------------------------------------------------
// Deterministic train/val/test split.
// ---------------------------------------------------------------------------

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

// Shuffles with the seeded generator, then takes floor(val*n) and
// floor(test*n) examples for those splits and the remainder for train.
inline std::tuple<Dataset, Dataset, Dataset> split(const Dataset& ds, SplitFractions fractions,
                                                   std::uint64_t seed) {
  const double sum = fractions.train + fractions.val + fractions.test;
  if (fractions.train <= 0 || fractions.val <= 0 || fractions.test <= 0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw UsageError("split: fractions must be positive and sum to 1");
  }
  const std::size_t n = ds.size();
  const auto n_val = static_cast<std::size_t>(std::floor(fractions.val * static_cast<double>(n)));
  const auto n_test = static_cast<std::size_t>(std::floor(fractions.test * static_cast<double>(n)));
  if (n_val == 0 || n_test == 0 || n_val + n_test >= n) {
    throw UsageError("split: a split would be empty at n=" + std::to_string(n));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng(seed).split("dataset-split");
  rng.shuffle(order);

  auto take = [&](std::size_t from, std::size_t count) {
    Dataset part;
    part.vocabulary = ds.vocabulary;
    part.class_names = ds.class_names;
    part.examples.reserve(count);
    for (std::size_t i = from; i < from + count; ++i) part.examples.push_back(ds.examples[order[i]]);
    return part;
  };
  const std::size_t n_train = n - n_val - n_test;
  return {take(0, n_train), take(n_train, n_val), take(n_train + n_val, n_test)};
}

inline Dataset concat(const Dataset& a, const Dataset& b) {
  if (a.dim() != b.dim() || a.class_names != b.class_names) {
    throw UsageError("concat: incompatible datasets");
  }
  Dataset out = a;
  out.examples.insert(out.examples.end(), b.examples.begin(), b.examples.end());
  return out;
}

// ---------------------------------------------------------------------------
// Noise-feature injection for the bias experiments.
// ---------------------------------------------------------------------------

struct NoiseSpec {
  std::size_t count = 2;
  double p_target = 0.30;  // presence probability on target-class training rows
  double p_other = 0.05;   // presence probability elsewhere
  int target_class = 0;
  std::uint64_t seed = 0;
};

struct NoiseInjection {
  Dataset train;
  Dataset test;
  std::vector<int> noisy_ids;
};

// Appends `spec.count` synthetic features. On training rows of the target
// class each is set with probability p_target, on other training rows with
// p_other; on test rows with p_other uniformly. Original columns are
// untouched.
inline NoiseInjection inject_noise_features(const Dataset& train, const Dataset& test,
                                            const NoiseSpec& spec) {
  if (spec.count < 1) throw UsageError("inject_noise_features: count must be >= 1");
  if (spec.target_class < 0 || static_cast<std::size_t>(spec.target_class) >= train.n_classes()) {
    throw UsageError("inject_noise_features: target class out of range");
  }

  NoiseInjection out{train, test, {}};
  for (std::size_t k = 0; k < spec.count; ++k) {
    std::string name = "noisy_" + std::to_string(k);
    while (out.train.vocabulary.contains(name)) name += "_";
    out.noisy_ids.push_back(out.train.vocabulary.append(name));
    out.test.vocabulary.append(name);
  }

  Rng rng = Rng(spec.seed).split("noise-injection");
  Rng train_rng = rng.split("train");
  for (auto& ex : out.train.examples) {
    const bool is_target = ex.has_label(static_cast<std::size_t>(spec.target_class));
    for (std::size_t k = 0; k < spec.count; ++k) {
      ex.concepts.push_back(train_rng.bernoulli(is_target ? spec.p_target : spec.p_other) ? 1.0
                                                                                          : 0.0);
    }
  }
  Rng test_rng = rng.split("test");
  for (auto& ex : out.test.examples) {
    for (std::size_t k = 0; k < spec.count; ++k) {
      ex.concepts.push_back(test_rng.bernoulli(spec.p_other) ? 1.0 : 0.0);
    }
  }
  return out;
}

}  // namespace lenp
