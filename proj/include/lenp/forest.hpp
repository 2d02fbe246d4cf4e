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
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lenp/dataset.hpp"
#include "lenp/errors.hpp"
#include "lenp/rng.hpp"

namespace lenp {

// A node either splits on one binary concept (x_j > 0.5 goes right) or is a
// leaf carrying a per-class probability vector. Nodes are stored in preorder.
struct TreeNode {
  int feature = -1;
  int left = -1;
  int right = -1;
  std::vector<double> leaf;

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  std::size_t max_depth = 0;

  const std::vector<double>& predict(const ConceptVector& x) const {
    int at = 0;
    while (!nodes[static_cast<std::size_t>(at)].is_leaf()) {
      const TreeNode& n = nodes[static_cast<std::size_t>(at)];
      at = concept_true(x[static_cast<std::size_t>(n.feature)]) ? n.right : n.left;
    }
    return nodes[static_cast<std::size_t>(at)].leaf;
  }
};

struct Forest {
  std::vector<DecisionTree> trees;
  std::size_t n_classes = 0;
  double feature_subsample = 0.5;
  std::uint64_t seed = 0;
};

struct ForestConfig {
  std::size_t n_trees = 50;
  std::size_t max_depth = 8;
  double feature_subsample = 0.5;
  std::uint64_t seed = 0;
};

namespace detail {

// Summed per-class binary gini impurity of the example subset.
inline double gini(const Dataset& ds, const std::vector<std::size_t>& idx) {
  if (idx.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t c = 0; c < ds.n_classes(); ++c) {
    double pos = 0.0;
    for (std::size_t i : idx) pos += ds.examples[i].has_label(c) ? 1.0 : 0.0;
    const double p = pos / static_cast<double>(idx.size());
    total += 2.0 * p * (1.0 - p);
  }
  return total;
}

inline std::vector<double> mean_labels(const Dataset& ds, const std::vector<std::size_t>& idx) {
  std::vector<double> mean(ds.n_classes(), 0.0);
  for (std::size_t i : idx) {
    for (std::size_t c = 0; c < ds.n_classes(); ++c) {
      mean[c] += ds.examples[i].has_label(c) ? 1.0 : 0.0;
    }
  }
  for (double& m : mean) m /= static_cast<double>(std::max<std::size_t>(idx.size(), 1));
  return mean;
}

inline int grow_node(DecisionTree& tree, const Dataset& ds, const std::vector<std::size_t>& idx,
                     std::size_t depth, std::size_t max_depth, std::size_t features_per_node,
                     Rng& rng) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();

  const double impurity = gini(ds, idx);
  if (depth >= max_depth || idx.size() < 2 || impurity == 0.0) {
    tree.nodes[static_cast<std::size_t>(id)].leaf = mean_labels(ds, idx);
    return id;
  }

  // Random feature subset for this node (partial Fisher-Yates).
  std::vector<std::size_t> pool(ds.dim());
  for (std::size_t j = 0; j < pool.size(); ++j) pool[j] = j;
  for (std::size_t j = 0; j < features_per_node; ++j) {
    std::swap(pool[j], pool[j + rng.next_below(pool.size() - j)]);
  }

  // Pick the valid split (both children nonempty) with the lowest weighted
  // child impurity; zero-gain splits are allowed so balanced parity concepts
  // can still be separated deeper down.
  double best_score = std::numeric_limits<double>::infinity();
  std::size_t best_feature = 0;
  bool found = false;
  std::vector<std::size_t> left, right;
  for (std::size_t j = 0; j < features_per_node; ++j) {
    const std::size_t f = pool[j];
    left.clear();
    right.clear();
    for (std::size_t i : idx) {
      (concept_true(ds.examples[i].concepts[f]) ? right : left).push_back(i);
    }
    if (left.empty() || right.empty()) continue;
    const double score = (static_cast<double>(left.size()) * gini(ds, left) +
                          static_cast<double>(right.size()) * gini(ds, right)) /
                         static_cast<double>(idx.size());
    if (score < best_score || (score == best_score && found && f < best_feature)) {
      best_score = score;
      best_feature = f;
      found = true;
    }
  }
  if (!found || best_score > impurity) {
    tree.nodes[static_cast<std::size_t>(id)].leaf = mean_labels(ds, idx);
    return id;
  }

  left.clear();
  right.clear();
  for (std::size_t i : idx) {
    (concept_true(ds.examples[i].concepts[best_feature]) ? right : left).push_back(i);
  }
  tree.nodes[static_cast<std::size_t>(id)].feature = static_cast<int>(best_feature);
  const int l = grow_node(tree, ds, left, depth + 1, max_depth, features_per_node, rng);
  tree.nodes[static_cast<std::size_t>(id)].left = l;
  const int r = grow_node(tree, ds, right, depth + 1, max_depth, features_per_node, rng);
  tree.nodes[static_cast<std::size_t>(id)].right = r;
  return id;
}

}  // namespace detail

inline Forest fit_forest(const Dataset& ds, const ForestConfig& cfg) {
  ds.validate();
  if (ds.size() == 0) throw UsageError("fit_forest: empty dataset");
  if (cfg.n_trees < 1) throw UsageError("fit_forest: needs at least one tree");
  if (cfg.feature_subsample <= 0.0 || cfg.feature_subsample > 1.0) {
    throw UsageError("fit_forest: feature_subsample must be in (0, 1]");
  }

  Forest forest;
  forest.n_classes = ds.n_classes();
  forest.feature_subsample = cfg.feature_subsample;
  forest.seed = cfg.seed;
  const auto features_per_node = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(cfg.feature_subsample * static_cast<double>(ds.dim()))));

  for (std::size_t t = 0; t < cfg.n_trees; ++t) {
    Rng rng = Rng(cfg.seed).split("forest-tree", t);
    std::vector<std::size_t> sample(ds.size());
    for (auto& i : sample) i = rng.next_below(ds.size());
    DecisionTree tree;
    tree.max_depth = cfg.max_depth;
    detail::grow_node(tree, ds, sample, 0, cfg.max_depth, features_per_node, rng);
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

inline std::vector<double> predict_proba(const Forest& forest, const ConceptVector& x) {
  if (forest.trees.empty()) throw UsageError("predict_proba: empty forest");
  std::vector<double> mean(forest.n_classes, 0.0);
  for (const auto& tree : forest.trees) {
    const auto& leaf = tree.predict(x);
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += leaf[c];
  }
  for (double& m : mean) m /= static_cast<double>(forest.trees.size());
  return mean;
}

// Replaces the labels of a dataset copy with a predictor's hard decisions at
// 0.5, the distillation target when a LEN explains a black box.
template <typename Predict>
Dataset relabel(const Dataset& ds, Predict&& predict) {
  Dataset out = ds;
  for (auto& ex : out.examples) {
    std::vector<double> p = predict(ex.concepts);
    for (std::size_t c = 0; c < ex.labels.size(); ++c) {
      ex.labels[c] = p[c] >= 0.5 ? 1 : 0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence: nodes flattened in preorder.
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const Forest& forest) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : forest.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
      if (n.is_leaf()) {
        nodes.push_back({{"leaf", n.leaf}});
      } else {
        nodes.push_back({{"feature", n.feature}, {"left", n.left}, {"right", n.right}});
      }
    }
    trees.push_back({{"max_depth", tree.max_depth}, {"nodes", std::move(nodes)}});
  }
  return {{"format", "lenp-forest-v1"},
          {"n_classes", forest.n_classes},
          {"feature_subsample", forest.feature_subsample},
          {"seed", forest.seed},
          {"trees", std::move(trees)}};
}

inline Forest forest_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "lenp-forest-v1") {
      throw UsageError("forest: unknown file format");
    }
    Forest forest;
    forest.n_classes = j.at("n_classes").get<std::size_t>();
    forest.feature_subsample = j.at("feature_subsample").get<double>();
    forest.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& jt : j.at("trees")) {
      DecisionTree tree;
      tree.max_depth = jt.at("max_depth").get<std::size_t>();
      for (const auto& jn : jt.at("nodes")) {
        TreeNode n;
        if (jn.contains("leaf")) {
          n.leaf = jn.at("leaf").get<std::vector<double>>();
          if (n.leaf.size() != forest.n_classes) throw UsageError("forest: leaf width mismatch");
        } else {
          n.feature = jn.at("feature").get<int>();
          n.left = jn.at("left").get<int>();
          n.right = jn.at("right").get<int>();
        }
        tree.nodes.push_back(std::move(n));
      }
      if (tree.nodes.empty()) throw UsageError("forest: empty tree");
      forest.trees.push_back(std::move(tree));
    }
    if (forest.trees.empty()) throw UsageError("forest: needs at least one tree");
    return forest;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("forest: malformed JSON: ") + e.what());
  }
}

inline void save_forest(const Forest& forest, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("forest: cannot write " + path);
  out << to_json(forest).dump(2) << "\n";
}

inline Forest load_forest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("forest: cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("forest: malformed JSON: ") + e.what());
  }
  return forest_from_json(j);
}

}  // namespace lenp
