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

#include "lenp/train.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

#include <gtest/gtest.h>

#include "lenp/dataset.hpp"
#include "lenp/errors.hpp"
#include "lenp/metrics.hpp"
#include "lenp/synthetic.hpp"

namespace lenp {
namespace {

TEST(Bce, MatchesNaiveFormulaWhereStable) {
  // Naive -y log p - (1-y) log(1-p) at moderate logits.
  for (double z : {-3.0, -0.5, 0.0, 0.7, 2.5}) {
    for (double y : {0.0, 1.0}) {
      const double p = 1.0 / (1.0 + std::exp(-z));
      const double naive = -y * std::log(p) - (1.0 - y) * std::log(1.0 - p);
      EXPECT_NEAR(detail::bce_from_logit(z, y), naive, 1e-12);
    }
  }
}

TEST(Bce, StableAtExtremeLogits) {
  EXPECT_TRUE(std::isfinite(detail::bce_from_logit(800.0, 0.0)));
  EXPECT_TRUE(std::isfinite(detail::bce_from_logit(-800.0, 1.0)));
  EXPECT_NEAR(detail::bce_from_logit(800.0, 1.0), 0.0, 1e-12);
  EXPECT_NEAR(detail::bce_from_logit(-800.0, 0.0), 0.0, 1e-12);
}

TEST(Gradient, MatchesFiniteDifferences) {
  Rng rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    Rng r = rng.split("gc", static_cast<std::uint64_t>(trial));
    const std::size_t d = 3 + r.next_below(6);
    EntropyLenModel m(d, {"a", "b"}, {4, 3}, 1.0, r.next_u64());
    ConceptVector x(d);
    for (auto& v : x) v = r.bernoulli(0.5) ? 1.0 : 0.0;
    std::vector<std::uint8_t> y{static_cast<std::uint8_t>(r.bernoulli(0.5)),
                                static_cast<std::uint8_t>(r.bernoulli(0.5))};
    const double err = gradient_check(m, x, y, 0.1, 50, r.next_u64());
    EXPECT_LT(err, 1e-4) << "trial " << trial;
  }
}

TEST(Gradient, EntropyTermAloneAlsoChecks) {
  EntropyLenModel m(5, {"a"}, {4}, 0.7, 3);
  ConceptVector x{1, 0, 1, 0, 1};
  const double err = gradient_check(m, x, {1}, 0.2, 40, 7, /*include_bce=*/false);
  EXPECT_LT(err, 1e-4);
}

TEST(Train, LossDecreasesOnLearnableTask) {
  Dataset ds = make_and_dataset(400, 6, 0);
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.hidden_sizes = {8};
  cfg.entropy_weight = 0.01;
  TrainLog log;
  EntropyLenModel m = train(ds, cfg, &log);
  ASSERT_EQ(log.loss_history.size(), 60u);
  EXPECT_LT(log.loss_history.back(), log.loss_history.front());
  // The logged value is the true objective on the full dataset.
  EXPECT_NEAR(log.loss_history.back(), compute_loss(m, ds, cfg.entropy_weight), 1e-9);
}

TEST(Train, LearnsConjunctionWellEnoughToClassify) {
  Dataset ds = make_and_dataset(600, 6, 1);
  TrainConfig cfg;
  cfg.epochs = 250;
  cfg.learning_rate = 0.02;
  cfg.entropy_weight = 0.005;
  cfg.hidden_sizes = {10};
  EntropyLenModel m = train(ds, cfg);
  const double f1 = class_f1([&](const ConceptVector& x) { return m.forward(x); }, ds, 0);
  EXPECT_GT(f1, 0.95);
}

TEST(Train, DeterministicPerSeed) {
  Dataset ds = make_and_dataset(120, 5, 4);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.hidden_sizes = {6};
  cfg.seed = 11;
  EntropyLenModel a = train(ds, cfg);
  EntropyLenModel b = train(ds, cfg);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());  // bit-identical weights

  cfg.seed = 12;
  EntropyLenModel c = train(ds, cfg);
  EXPECT_NE(a.to_json().dump(), c.to_json().dump());
}

TEST(Train, MiniBatchesAlsoConverge) {
  Dataset ds = make_and_dataset(300, 5, 2);
  TrainConfig cfg;
  cfg.epochs = 80;
  cfg.batch_size = 32;
  cfg.hidden_sizes = {8};
  cfg.entropy_weight = 0.01;
  TrainLog log;
  train(ds, cfg, &log);
  EXPECT_LT(log.loss_history.back(), log.loss_history.front());
}

TEST(Train, DivergenceRaisesNumericalError) {
  Dataset ds = make_and_dataset(100, 5, 0);
  TrainConfig cfg;
  cfg.learning_rate = 1e200;  // first update overflows the logits
  cfg.epochs = 50;
  cfg.hidden_sizes = {8};
  EXPECT_THROW(train(ds, cfg), NumericalError);
}

TEST(Train, ValidatesConfig) {
  Dataset ds = make_and_dataset(50, 4, 0);
  TrainConfig cfg;
  cfg.learning_rate = 0;
  EXPECT_THROW(train(ds, cfg), UsageError);
  cfg = TrainConfig{};
  cfg.momentum = 1.0;
  EXPECT_THROW(train(ds, cfg), UsageError);
  cfg = TrainConfig{};
  cfg.hidden_sizes = {};
  EXPECT_THROW(train(ds, cfg), UsageError);
}

TEST(Train, EntropyWeightSparsifiesGate) {
  // Same data and seed; a heavier entropy penalty concentrates alpha.
  Dataset ds = make_and_dataset(400, 8, 5);
  TrainConfig light;
  light.epochs = 120;
  light.entropy_weight = 0.0;
  light.hidden_sizes = {8};
  TrainConfig heavy = light;
  heavy.entropy_weight = 0.3;
  EntropyLenModel a = train(ds, light);
  EntropyLenModel b = train(ds, heavy);
  EXPECT_LT(EntropyLenModel::entropy(b.alpha_scores(0).alpha),
            EntropyLenModel::entropy(a.alpha_scores(0).alpha));
}

}  // namespace
}  // namespace lenp
