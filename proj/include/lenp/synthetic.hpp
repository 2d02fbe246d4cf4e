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
#include <string>
#include <vector>

#include "lenp/dataset.hpp"
#include "lenp/errors.hpp"
#include "lenp/rng.hpp"

namespace lenp {

// ---------------------------------------------------------------------------
// Tagged-question corpus: each class has a handful of strong keywords, plus
// shared filler words. The workhorse corpus for training demos and the bias
// experiments.
// ---------------------------------------------------------------------------

struct TagsSpec {
  std::size_t n_docs = 1200;
  std::size_t n_classes = 3;
  std::size_t keywords_per_class = 5;  // at most 5 distinct keywords exist
  double p_keyword = 0.55;             // class keyword presence on its own docs
  double p_leak = 0.03;                // class keyword presence on other docs
  std::size_t n_fillers = 40;
  double p_filler = 0.25;
  double p_second_label = 0.15;  // chance of a second tag
  std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<std::vector<std::string>> tag_keywords(std::size_t n_classes) {
  static const std::vector<std::vector<std::string>> known = {
      {"c#", ".net", "linq", "visualstudio", "nuget"},
      {"java", "jvm", "maven", "spring", "jakarta"},
      {"python", "pandas", "numpy", "django", "flask"},
  };
  std::vector<std::vector<std::string>> out;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (c < known.size()) {
      out.push_back(known[c]);
    } else {
      std::vector<std::string> words;
      for (std::size_t i = 0; i < 5; ++i) {
        words.push_back("tag" + std::to_string(c) + "kw" + std::to_string(i));
      }
      out.push_back(std::move(words));
    }
  }
  return out;
}

inline std::vector<std::string> filler_words(std::size_t n) {
  static const std::vector<std::string> common = {
      "error",  "help",   "code",   "function", "loop",   "string", "value",
      "file",   "test",   "build",  "install",  "array",  "class",  "method",
      "object", "server", "query",  "update",   "print",  "parse",
  };
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < common.size()) {
      out.push_back(common[i]);
    } else {
      out.push_back("word" + std::to_string(i));
    }
  }
  return out;
}

}  // namespace detail

inline std::vector<std::string> tag_class_names(std::size_t n_classes) {
  static const std::vector<std::string> known = {"csharp", "java", "python"};
  std::vector<std::string> out;
  for (std::size_t c = 0; c < n_classes; ++c) {
    out.push_back(c < known.size() ? known[c] : "tag" + std::to_string(c));
  }
  return out;
}

inline std::vector<RawDocument> make_tags_corpus(const TagsSpec& spec) {
  if (spec.n_docs < 10 || spec.n_classes < 2) throw UsageError("tags corpus: too small");
  if (spec.keywords_per_class < 1 || spec.keywords_per_class > 5)
    throw UsageError("tags corpus: keywords_per_class must be in [1, 5]");
  const auto classes = tag_class_names(spec.n_classes);
  auto keywords = detail::tag_keywords(spec.n_classes);
  for (auto& ks : keywords) ks.resize(spec.keywords_per_class);
  const auto fillers = detail::filler_words(spec.n_fillers);

  std::vector<RawDocument> docs;
  Rng rng = Rng(spec.seed).split("tags-corpus");
  for (std::size_t i = 0; i < spec.n_docs; ++i) {
    Rng doc_rng = rng.split("doc", i);
    std::vector<bool> tagged(spec.n_classes, false);
    tagged[i % spec.n_classes] = true;  // balanced primary tags
    if (doc_rng.bernoulli(spec.p_second_label)) {
      tagged[doc_rng.next_below(spec.n_classes)] = true;
    }

    RawDocument doc;
    doc.text = "how do i fix";
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
      const double p = tagged[c] ? spec.p_keyword : spec.p_leak;
      for (const auto& w : keywords[c]) {
        if (doc_rng.bernoulli(p)) doc.text += " " + w;
      }
      if (tagged[c]) doc.labels.push_back(classes[c]);
    }
    for (const auto& w : fillers) {
      if (doc_rng.bernoulli(spec.p_filler)) doc.text += " " + w;
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

// ---------------------------------------------------------------------------
// Faithfulness corpus: engineered so explanation strategies differ. Each
// class carries rare-but-precise keywords (mostly absent on its own docs),
// moderately reliable markers, and everyone shares uninformative fillers.
// ---------------------------------------------------------------------------

struct FaithfulnessSpec {
  std::size_t n_docs = 1500;
  std::size_t n_classes = 3;
  std::size_t n_rare = 4;     // precise keywords, usually absent
  double p_rare_in = 0.20;
  double p_rare_out = 0.002;
  std::size_t n_marks = 4;    // reliable presence markers
  double p_mark_in = 0.75;
  double p_mark_out = 0.08;
  std::size_t n_fillers = 30;
  double p_filler = 0.5;
  std::uint64_t seed = 0;
};

inline std::vector<RawDocument> make_faithfulness_corpus(const FaithfulnessSpec& spec) {
  if (spec.n_docs < 10 || spec.n_classes < 2) throw UsageError("faithfulness corpus: too small");
  static const std::vector<std::string> palette = {"red",    "green", "blue",
                                                   "orange", "violet", "teal"};
  std::vector<std::string> classes;
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    classes.push_back(c < palette.size() ? palette[c] : "hue" + std::to_string(c));
  }

  std::vector<RawDocument> docs;
  Rng rng = Rng(spec.seed).split("faithfulness-corpus");
  for (std::size_t i = 0; i < spec.n_docs; ++i) {
    Rng doc_rng = rng.split("doc", i);
    const std::size_t cls = i % spec.n_classes;

    RawDocument doc;
    doc.labels.push_back(classes[cls]);
    doc.text = "item";
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
      const double p_rare = c == cls ? spec.p_rare_in : spec.p_rare_out;
      const double p_mark = c == cls ? spec.p_mark_in : spec.p_mark_out;
      for (std::size_t k = 0; k < spec.n_rare; ++k) {
        if (doc_rng.bernoulli(p_rare)) doc.text += " " + classes[c] + "sig" + std::to_string(k);
      }
      for (std::size_t k = 0; k < spec.n_marks; ++k) {
        if (doc_rng.bernoulli(p_mark)) doc.text += " " + classes[c] + "mark" + std::to_string(k);
      }
    }
    for (std::size_t k = 0; k < spec.n_fillers; ++k) {
      if (doc_rng.bernoulli(spec.p_filler)) doc.text += " fill" + std::to_string(k);
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

// ---------------------------------------------------------------------------
// Conjunction-recovery task on raw concepts: the single label is x1 AND x2.
// ---------------------------------------------------------------------------

inline Dataset make_and_dataset(std::size_t n_samples, std::size_t dim, std::uint64_t seed) {
  if (dim < 2) throw UsageError("and dataset: needs at least two features");
  Dataset ds;
  for (std::size_t j = 0; j < dim; ++j) ds.vocabulary.append("x" + std::to_string(j + 1));
  ds.class_names = {"both"};
  Rng rng = Rng(seed).split("and-dataset");
  for (std::size_t i = 0; i < n_samples; ++i) {
    LabeledExample ex;
    ex.concepts.resize(dim);
    for (auto& v : ex.concepts) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    ex.labels = {static_cast<std::uint8_t>(concept_true(ex.concepts[0]) &&
                                           concept_true(ex.concepts[1]))};
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

}  // namespace lenp
