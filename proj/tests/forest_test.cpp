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

#include "lenp/forest.hpp"

#include <cstddef>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "lenp/dataset.hpp"
#include "lenp/errors.hpp"
#include "lenp/metrics.hpp"
#include "lenp/rng.hpp"
#include "lenp/synthetic.hpp"

namespace lenp {
namespace {

Dataset xor_dataset(std::size_t n, std::uint64_t seed) {
  Dataset ds;
  ds.vocabulary.append("a");
  ds.vocabulary.append("b");
  ds.vocabulary.append("pad");
  ds.class_names = {"odd"};
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const bool a = rng.bernoulli(0.5);
    const bool b = rng.bernoulli(0.5);
    ds.examples.push_back({{a ? 1.0 : 0.0, b ? 1.0 : 0.0, rng.bernoulli(0.5) ? 1.0 : 0.0},
                           {static_cast<std::uint8_t>(a != b ? 1 : 0)},
                           ""});
  }
  return ds;
}

TEST(Gini, HandValues) {
  Dataset ds;
  ds.vocabulary.append("x");
  ds.class_names = {"c"};
  for (int i = 0; i < 4; ++i) {
    ds.examples.push_back({{0.0}, {static_cast<std::uint8_t>(i < 2 ? 1 : 0)}, ""});
  }
  // Balanced: 2 * 0.5 * 0.5 = 0.5. Pure subsets: 0.
  EXPECT_DOUBLE_EQ(detail::gini(ds, {0, 1, 2, 3}), 0.5);
  EXPECT_DOUBLE_EQ(detail::gini(ds, {0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(detail::gini(ds, {1, 2}), 0.5);
  EXPECT_DOUBLE_EQ(detail::gini(ds, {}), 0.0);
}

TEST(Gini, SumsOverClasses) {
  Dataset ds;
  ds.vocabulary.append("x");
  ds.class_names = {"c1", "c2"};
  ds.examples.push_back({{0.0}, {1, 0}, ""});
  ds.examples.push_back({{0.0}, {0, 1}, ""});
  // Each class is balanced across the two rows: 0.5 + 0.5.
  EXPECT_DOUBLE_EQ(detail::gini(ds, {0, 1}), 1.0);
}

TEST(Tree, PredictFollowsSplits) {
  // Hand-built stump: split on feature 1, true -> leaf {0.9}, false -> {0.2}.
  DecisionTree tree;
  tree.nodes.resize(3);
  tree.nodes[0].feature = 1;
  tree.nodes[0].left = 1;
  tree.nodes[0].right = 2;
  tree.nodes[1].leaf = {0.2};
  tree.nodes[2].leaf = {0.9};
  EXPECT_DOUBLE_EQ(tree.predict({0, 1, 0})[0], 0.9);
  EXPECT_DOUBLE_EQ(tree.predict({1, 0, 1})[0], 0.2);
  EXPECT_TRUE(tree.nodes[1].is_leaf());
  EXPECT_FALSE(tree.nodes[0].is_leaf());
}

TEST(Forest, FitsPureConceptExactly) {
  Dataset ds = make_and_dataset(400, 6, 0);
  ForestConfig cfg;
  cfg.n_trees = 30;
  cfg.seed = 1;
  Forest forest = fit_forest(ds, cfg);
  const double f1 =
      class_f1([&](const ConceptVector& x) { return predict_proba(forest, x); }, ds, 0);
  EXPECT_GT(f1, 0.99);
}

TEST(Forest, LearnsXorDespiteZeroGainRoot) {
  // Balanced XOR has no first-split gain; zero-gain splits must be taken.
  Dataset ds = xor_dataset(600, 3);
  ForestConfig cfg;
  cfg.n_trees = 30;
  cfg.max_depth = 6;
  cfg.feature_subsample = 1.0;
  cfg.seed = 2;
  Forest forest = fit_forest(ds, cfg);
  const double f1 =
      class_f1([&](const ConceptVector& x) { return predict_proba(forest, x); }, ds, 0);
  EXPECT_GT(f1, 0.95);
}

TEST(Forest, ProbabilitiesAreMeansOfLeaves) {
  Dataset ds = make_and_dataset(200, 5, 4);
  ForestConfig cfg;
  cfg.n_trees = 7;
  cfg.seed = 9;
  Forest forest = fit_forest(ds, cfg);
  ConceptVector x{1, 1, 0, 1, 0};
  double sum = 0.0;
  for (const auto& tree : forest.trees) sum += tree.predict(x)[0];
  EXPECT_NEAR(predict_proba(forest, x)[0], sum / 7.0, 1e-12);
}

TEST(Forest, DeterministicPerSeed) {
  Dataset ds = make_and_dataset(150, 5, 6);
  ForestConfig cfg;
  cfg.n_trees = 5;
  cfg.seed = 42;
  const std::string a = to_json(fit_forest(ds, cfg)).dump();
  const std::string b = to_json(fit_forest(ds, cfg)).dump();
  EXPECT_EQ(a, b);
  cfg.seed = 43;
  EXPECT_NE(to_json(fit_forest(ds, cfg)).dump(), a);
}

TEST(Forest, DepthLimitHolds) {
  Dataset ds = xor_dataset(400, 5);
  ForestConfig cfg;
  cfg.n_trees = 10;
  cfg.max_depth = 2;
  cfg.seed = 0;
  Forest forest = fit_forest(ds, cfg);
  // Depth 2 allows at most 7 nodes (root + 2 + 4).
  for (const auto& tree : forest.trees) {
    EXPECT_LE(tree.nodes.size(), 7u);
  }
}

TEST(Forest, JsonRoundTripPredictsIdentically) {
  Dataset ds = make_and_dataset(200, 6, 8);
  ForestConfig cfg;
  cfg.n_trees = 9;
  cfg.seed = 5;
  Forest forest = fit_forest(ds, cfg);
  Forest back = forest_from_json(to_json(forest));
  EXPECT_EQ(back.trees.size(), forest.trees.size());
  EXPECT_EQ(back.n_classes, forest.n_classes);
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    ConceptVector x(6);
    for (auto& v : x) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    EXPECT_EQ(predict_proba(forest, x), predict_proba(back, x));
  }
}

TEST(Forest, SaveLoadFile) {
  const std::string path = testing::TempDir() + "/forest_io.json";
  Dataset ds = make_and_dataset(100, 4, 1);
  ForestConfig cfg;
  cfg.n_trees = 3;
  Forest forest = fit_forest(ds, cfg);
  save_forest(forest, path);
  Forest back = load_forest(path);
  ConceptVector x{1, 1, 0, 0};
  EXPECT_EQ(predict_proba(forest, x), predict_proba(back, x));
  EXPECT_THROW(load_forest(testing::TempDir() + "/missing_forest.json"), UsageError);
}

TEST(Forest, ValidatesConfig) {
  Dataset ds = make_and_dataset(50, 4, 0);
  ForestConfig cfg;
  cfg.n_trees = 0;
  EXPECT_THROW(fit_forest(ds, cfg), UsageError);
  cfg = ForestConfig{};
  cfg.feature_subsample = 0.0;
  EXPECT_THROW(fit_forest(ds, cfg), UsageError);
  cfg.feature_subsample = 1.5;
  EXPECT_THROW(fit_forest(ds, cfg), UsageError);
  Forest empty;
  EXPECT_THROW(predict_proba(empty, {1.0}), UsageError);
}

TEST(Relabel, HardensPredictionsAtHalf) {
  Dataset ds = make_and_dataset(20, 4, 2);
  auto predict = [](const ConceptVector& x) {
    return std::vector<double>{x[0] > 0.5 ? 0.8 : 0.3};
  };
  Dataset out = relabel(ds, predict);
  ASSERT_EQ(out.size(), ds.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out.examples[i].has_label(0), concept_true(ds.examples[i].concepts[0]));
    // Inputs untouched.
    EXPECT_EQ(out.examples[i].concepts, ds.examples[i].concepts);
  }
}

}  // namespace
}  // namespace lenp
