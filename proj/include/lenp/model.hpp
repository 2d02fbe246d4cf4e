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

#include <cmath>
#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lenp/dataset.hpp"
#include "lenp/errors.hpp"
#include "lenp/rng.hpp"

namespace lenp {

// Row-major dense matrix, just enough for the small per-class networks.
struct DenseLayer {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> weights;  // rows x cols, row-major
  std::vector<double> bias;     // rows

  double& at(std::size_t r, std::size_t c) { return weights[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return weights[r * cols + c]; }

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = bias[r];
      const double* w = weights.data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) acc += w[c] * x[c];
      out[r] = acc;
    }
    return out;
  }
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline void relu_inplace(std::vector<double>& v) {
  for (double& x : v) x = x > 0.0 ? x : 0.0;
}

// Per-class feature importances. alpha is the softmax over the L1 norms of
// the first-layer weight columns (a probability simplex); alpha_tilde is the
// same vector max-normalized so its largest entry is exactly 1.
struct AlphaScores {
  std::vector<double> alpha;
  std::vector<double> alpha_tilde;
};

// One per-class subnetwork: input gate driven by the first layer's own
// weights, then dense layers with relu and a sigmoid head.
struct ClassNetwork {
  std::vector<DenseLayer> layers;  // layers[0] is h x d; the last is 1 x h
};

// Entropy-based LEN: r independent gated subnetworks over d input concepts.
class EntropyLenModel {
 public:
  EntropyLenModel() = default;

  EntropyLenModel(std::size_t dim, std::vector<std::string> class_names,
                  std::vector<std::size_t> hidden_sizes, double tau, std::uint64_t seed,
                  std::string vocab_ref = "")
      : dim_(dim),
        tau_(tau),
        class_names_(std::move(class_names)),
        vocab_ref_(std::move(vocab_ref)) {
    if (dim_ < 1) throw UsageError("model: input dimension must be >= 1");
    if (tau_ <= 0) throw UsageError("model: temperature must be positive");
    if (hidden_sizes.empty()) throw UsageError("model: needs at least one hidden layer");
    Rng rng = Rng(seed).split("model-init");
    for (std::size_t c = 0; c < class_names_.size(); ++c) {
      ClassNetwork net;
      std::size_t fan_in = dim_;
      for (std::size_t h : hidden_sizes) {
        net.layers.push_back(init_layer(h, fan_in, rng));
        fan_in = h;
      }
      net.layers.push_back(init_layer(1, fan_in, rng));
      classes_.push_back(std::move(net));
    }
  }

  std::size_t dim() const { return dim_; }
  std::size_t n_classes() const { return classes_.size(); }
  double tau() const { return tau_; }
  double theta() const { return theta_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const std::string& vocab_ref() const { return vocab_ref_; }
  void set_vocab_ref(std::string ref) { vocab_ref_ = std::move(ref); }

  ClassNetwork& network(std::size_t cls) { return classes_.at(cls); }
  const ClassNetwork& network(std::size_t cls) const { return classes_.at(cls); }

  int class_id(const std::string& name) const {
    for (std::size_t i = 0; i < class_names_.size(); ++i) {
      if (class_names_[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  // gamma_j = L1 norm of column j of the class's first layer.
  std::vector<double> gamma(std::size_t cls) const {
    const DenseLayer& first = network(cls).layers.front();
    std::vector<double> g(dim_, 0.0);
    for (std::size_t r = 0; r < first.rows; ++r) {
      for (std::size_t c = 0; c < dim_; ++c) g[c] += std::abs(first.at(r, c));
    }
    return g;
  }

  AlphaScores alpha_scores(std::size_t cls) const {
    std::vector<double> g = gamma(cls);
    AlphaScores scores;
    scores.alpha = softmax_scaled(g, 1.0 / tau_);
    scores.alpha_tilde = scores.alpha;
    double mx = 0.0;
    for (double a : scores.alpha) mx = std::max(mx, a);
    for (double& a : scores.alpha_tilde) a /= mx;
    return scores;
  }

  // A^(cls): features whose normalized score clears the threshold. With
  // use_raw the threshold applies to the raw softmax alpha instead.
  std::vector<int> relevant_features(std::size_t cls, bool use_raw = false) const {
    AlphaScores scores = alpha_scores(cls);
    const auto& ref = use_raw ? scores.alpha : scores.alpha_tilde;
    std::vector<int> out;
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (ref[j] >= 0.5) out.push_back(static_cast<int>(j));
    }
    return out;
  }

  double forward_class(const ConceptVector& x, std::size_t cls) const {
    if (x.size() != dim_) throw UsageError("forward: input dimension mismatch");
    AlphaScores scores = alpha_scores(cls);
    std::vector<double> h(dim_);
    for (std::size_t j = 0; j < dim_; ++j) h[j] = scores.alpha_tilde[j] * x[j];
    const auto& layers = network(cls).layers;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      h = layers[l].apply(h);
      if (l + 1 < layers.size()) relu_inplace(h);
    }
    return sigmoid(h[0]);
  }

  // Probability per class, each in [0, 1].
  std::vector<double> forward(const ConceptVector& x) const {
    std::vector<double> out(n_classes());
    for (std::size_t c = 0; c < n_classes(); ++c) out[c] = forward_class(x, c);
    return out;
  }

  // Sum over classes of H(alpha^(i)); in [0, r * log d]. 0*log 0 counts as 0.
  double entropy_penalty() const {
    double total = 0.0;
    for (std::size_t c = 0; c < n_classes(); ++c) {
      total += entropy(alpha_scores(c).alpha);
    }
    return total;
  }

  static double entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p) {
      if (v > 0.0) h -= v * std::log(v);
    }
    return h;
  }

  // softmax(scale * g), guarded against overflow by max subtraction.
  static std::vector<double> softmax_scaled(const std::vector<double>& g, double scale) {
    double mx = g[0] * scale;
    for (double v : g) mx = std::max(mx, v * scale);
    std::vector<double> out(g.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      out[j] = std::exp(g[j] * scale - mx);
      sum += out[j];
    }
    for (double& v : out) v /= sum;
    return out;
  }

  // --- persistence -------------------------------------------------------

  nlohmann::json to_json() const {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& net : classes_) {
      nlohmann::json layers = nlohmann::json::array();
      for (const auto& layer : net.layers) {
        layers.push_back({{"rows", layer.rows},
                          {"cols", layer.cols},
                          {"weights", layer.weights},
                          {"bias", layer.bias}});
      }
      classes.push_back({{"layers", layers}});
    }
    return {{"format", "lenp-model-v1"}, {"class_names", class_names_},
            {"vocab_ref", vocab_ref_},   {"tau", tau_},
            {"theta", theta_},           {"dim", dim_},
            {"classes", classes}};
  }

  static EntropyLenModel from_json(const nlohmann::json& j) {
    EntropyLenModel m;
    if (j.value("format", "") != "lenp-model-v1") throw UsageError("model: unknown file format");
    m.dim_ = j.at("dim").get<std::size_t>();
    m.tau_ = j.at("tau").get<double>();
    m.theta_ = j.at("theta").get<double>();
    m.vocab_ref_ = j.value("vocab_ref", "");
    m.class_names_ = j.at("class_names").get<std::vector<std::string>>();
    for (const auto& cj : j.at("classes")) {
      ClassNetwork net;
      for (const auto& lj : cj.at("layers")) {
        DenseLayer layer;
        layer.rows = lj.at("rows").get<std::size_t>();
        layer.cols = lj.at("cols").get<std::size_t>();
        layer.weights = lj.at("weights").get<std::vector<double>>();
        layer.bias = lj.at("bias").get<std::vector<double>>();
        if (layer.weights.size() != layer.rows * layer.cols || layer.bias.size() != layer.rows) {
          throw UsageError("model: layer shape mismatch");
        }
        net.layers.push_back(std::move(layer));
      }
      m.classes_.push_back(std::move(net));
    }
    if (m.classes_.size() != m.class_names_.size()) throw UsageError("model: class count mismatch");
    return m;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write model file: " + path);
    out << to_json().dump(2) << "\n";
  }

  static EntropyLenModel load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open model file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw UsageError("model file is not valid JSON: " + path);
    return from_json(j);
  }

 private:
  static DenseLayer init_layer(std::size_t rows, std::size_t cols, Rng& rng) {
    DenseLayer layer;
    layer.rows = rows;
    layer.cols = cols;
    layer.weights.resize(rows * cols);
    layer.bias.assign(rows, 0.0);
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (double& w : layer.weights) w = rng.uniform(-bound, bound);
    return layer;
  }

  std::size_t dim_ = 0;
  double tau_ = 1.0;
  double theta_ = kPredicateThreshold;
  std::vector<std::string> class_names_;
  std::string vocab_ref_;
  std::vector<ClassNetwork> classes_;
};

}  // namespace lenp
