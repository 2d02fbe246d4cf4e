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
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lenp/errors.hpp"

namespace lenp {

// Each vocabulary term is one input concept; feature ids are contiguous,
// stable and in [0, size()).
class Vocabulary {
 public:
  Vocabulary() = default;

  explicit Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      auto [it, inserted] = index_.emplace(terms_[i], static_cast<int>(i));
      if (!inserted) throw UsageError("duplicate vocabulary term: " + terms_[i]);
    }
  }

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::string& term(int id) const { return terms_.at(static_cast<std::size_t>(id)); }

  // -1 when the token is out of vocabulary.
  int id_of(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? -1 : it->second;
  }

  bool contains(const std::string& token) const { return index_.count(token) > 0; }

  // Appends a term, returns its new id.
  int append(const std::string& term) {
    auto [it, inserted] = index_.emplace(term, static_cast<int>(terms_.size()));
    if (!inserted) throw UsageError("duplicate vocabulary term: " + term);
    terms_.push_back(term);
    return it->second;
  }

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, int> index_;
};

// Keeps the `max_features` terms with the highest document frequency among
// those occurring in at least `min_doc_freq` documents and in at most a
// `max_doc_freq` fraction of them (near-constant terms carry no signal).
// Ties break lexicographically, and ids follow the same (frequency desc,
// term asc) order.
inline Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs,
                                   std::size_t max_features, std::size_t min_doc_freq = 1,
                                   double max_doc_freq = 1.0) {
  if (docs.empty()) throw UsageError("build_vocabulary: empty corpus");
  if (max_features < 1) throw UsageError("build_vocabulary: max_features must be >= 1");
  if (max_doc_freq <= 0.0 || max_doc_freq > 1.0) {
    throw UsageError("build_vocabulary: max_doc_freq must be in (0, 1]");
  }

  std::map<std::string, std::size_t> doc_freq;
  for (const auto& doc : docs) {
    // Each token counts once per document.
    std::unordered_set<std::string_view> uniq(doc.begin(), doc.end());
    for (auto tok : uniq) ++doc_freq[std::string(tok)];
  }

  const double df_cap = max_doc_freq * static_cast<double>(docs.size());
  std::vector<std::pair<std::string, std::size_t>> survivors;
  for (const auto& [term, df] : doc_freq) {
    if (df >= min_doc_freq && static_cast<double>(df) <= df_cap) survivors.emplace_back(term, df);
  }
  if (survivors.empty()) {
    throw UsageError("build_vocabulary: no token met the document-frequency bounds");
  }

  std::sort(survivors.begin(), survivors.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (survivors.size() > max_features) survivors.resize(max_features);

  std::vector<std::string> terms;
  terms.reserve(survivors.size());
  for (auto& [term, df] : survivors) terms.push_back(std::move(term));
  return Vocabulary(std::move(terms));
}

// Binary bag-of-words presence vector over the vocabulary; length d, entries
// in {0, 1}. Multiplicity is ignored and unknown tokens are skipped.
inline std::vector<double> encode(const std::vector<std::string>& doc, const Vocabulary& vocab) {
  if (vocab.empty()) throw UsageError("encode: empty vocabulary");
  std::vector<double> values(vocab.size(), 0.0);
  for (const auto& tok : doc) {
    int id = vocab.id_of(tok);
    if (id >= 0) values[static_cast<std::size_t>(id)] = 1.0;
  }
  return values;
}

}  // namespace lenp
