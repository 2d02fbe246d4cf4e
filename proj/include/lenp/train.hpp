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
#include <string>
#include <vector>

#include "lenp/dataset.hpp"
#include "lenp/errors.hpp"
#include "lenp/model.hpp"
#include "lenp/rng.hpp"

namespace lenp {

struct TrainConfig {
  double learning_rate = 1e-2;
  std::size_t epochs = 200;
  std::size_t batch_size = 0;  // 0 = full batch
  double entropy_weight = 0.1;
  double temperature = 1.0;
  std::vector<std::size_t> hidden_sizes = {20, 20};
  double momentum = 0.9;
  std::uint64_t seed = 0;

  void validate() const {
    if (learning_rate <= 0 || epochs < 1 || entropy_weight < 0 || temperature <= 0 ||
        hidden_sizes.empty() || momentum < 0 || momentum >= 1) {
      throw UsageError("train: invalid configuration");
    }
  }
};

struct TrainLog {
  std::vector<double> loss_history;  // objective after each epoch
};

namespace detail {

// log(1 + e^z) - z*y, the numerically safe binary cross-entropy on the logit.
inline double bce_from_logit(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

struct ClassGradients {
  std::vector<DenseLayer> layers;  // same shapes, weights/bias hold gradients

  explicit ClassGradients(const ClassNetwork& net) {
    for (const auto& l : net.layers) {
      DenseLayer g;
      g.rows = l.rows;
      g.cols = l.cols;
      g.weights.assign(l.weights.size(), 0.0);
      g.bias.assign(l.bias.size(), 0.0);
      layers.push_back(std::move(g));
    }
  }

  void scale(double f) {
    for (auto& l : layers) {
      for (double& w : l.weights) w *= f;
      for (double& b : l.bias) b *= f;
    }
  }
};

// Activations for one example through one class network.
struct ForwardTrace {
  std::vector<double> gated;               // alpha_tilde ⊙ x
  std::vector<std::vector<double>> pre;    // pre-activation per layer
  std::vector<std::vector<double>> post;   // post-activation per layer (relu; head raw)
  double logit = 0.0;
  double prob = 0.0;
};

inline ForwardTrace forward_trace(const ClassNetwork& net, const std::vector<double>& alpha_tilde,
                                  const ConceptVector& x) {
  ForwardTrace t;
  t.gated.resize(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) t.gated[j] = alpha_tilde[j] * x[j];
  const std::vector<double>* cur = &t.gated;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    t.pre.push_back(net.layers[l].apply(*cur));
    t.post.push_back(t.pre.back());
    if (l + 1 < net.layers.size()) relu_inplace(t.post.back());
    cur = &t.post.back();
  }
  t.logit = t.post.back()[0];
  t.prob = sigmoid(t.logit);
  return t;
}

// Backpropagates d(bce)/d(logit) = prob - y through the layers. Accumulates
// weight gradients into `grads` and the gradient w.r.t. alpha_tilde into
// `d_alpha_tilde` (the gate path; the gamma chain is applied per batch).
inline void backward_trace(const ClassNetwork& net, const ForwardTrace& t, const ConceptVector& x,
                           double y, ClassGradients& grads, std::vector<double>& d_alpha_tilde) {
  const std::size_t n_layers = net.layers.size();
  std::vector<double> delta{t.prob - y};

  for (std::size_t l = n_layers; l-- > 0;) {
    const DenseLayer& layer = net.layers[l];
    DenseLayer& grad = grads.layers[l];
    const std::vector<double>& input = l == 0 ? t.gated : t.post[l - 1];
    for (std::size_t r = 0; r < layer.rows; ++r) {
      const double g = delta[r];
      grad.bias[r] += g;
      double* gw = grad.weights.data() + r * layer.cols;
      for (std::size_t c = 0; c < layer.cols; ++c) gw[c] += g * input[c];
    }
    std::vector<double> below(layer.cols, 0.0);
    for (std::size_t r = 0; r < layer.rows; ++r) {
      const double g = delta[r];
      const double* w = layer.weights.data() + r * layer.cols;
      for (std::size_t c = 0; c < layer.cols; ++c) below[c] += g * w[c];
    }
    if (l > 0) {
      // Through the relu of the layer below.
      for (std::size_t c = 0; c < layer.cols; ++c) {
        if (t.pre[l - 1][c] <= 0.0) below[c] = 0.0;
      }
      delta = std::move(below);
    } else {
      for (std::size_t j = 0; j < x.size(); ++j) d_alpha_tilde[j] += below[j] * x[j];
    }
  }
}

// Chains a gradient w.r.t. alpha_tilde plus the entropy term back to the
// first layer's weights via gamma. alpha_tilde = s / s[argmax], s =
// softmax(gamma / tau), gamma_j = sum_k |W1[k][j]|.
inline void apply_gate_chain(const ClassNetwork& net, const std::vector<double>& s, double tau,
                             const std::vector<double>& d_alpha_tilde, double entropy_weight,
                             ClassGradients& grads) {
  const std::size_t d = s.size();
  std::size_t argmax = 0;
  for (std::size_t j = 1; j < d; ++j) {
    if (s[j] > s[argmax]) argmax = j;
  }
  const double s_max = s[argmax];

  // d(loss)/d(s): the max-normalization chain. alpha_tilde[argmax] is
  // identically 1, so its own derivative vanishes.
  std::vector<double> ds(d, 0.0);
  double cross = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    if (j == argmax) continue;
    ds[j] = d_alpha_tilde[j] / s_max;
    cross += d_alpha_tilde[j] * s[j];
  }
  ds[argmax] = -cross / (s_max * s_max);

  // Softmax jacobian: d(loss)/d(gamma_l) = (1/tau) s_l (ds_l - <s, ds>).
  double dot = 0.0;
  for (std::size_t j = 0; j < d; ++j) dot += s[j] * ds[j];
  std::vector<double> dgamma(d);
  for (std::size_t l = 0; l < d; ++l) dgamma[l] = s[l] * (ds[l] - dot) / tau;

  if (entropy_weight > 0.0) {
    // d(H(s))/d(gamma_l) = -(1/tau) s_l (log s_l + H).
    double h = EntropyLenModel::entropy(s);
    for (std::size_t l = 0; l < d; ++l) {
      if (s[l] > 0.0) dgamma[l] -= entropy_weight * s[l] * (std::log(s[l]) + h) / tau;
    }
  }

  // gamma_j = sum_k |W1[k][j]|: route through the sign of each weight.
  const DenseLayer& first = net.layers.front();
  DenseLayer& grad = grads.layers.front();
  for (std::size_t r = 0; r < first.rows; ++r) {
    const double* w = first.weights.data() + r * first.cols;
    double* gw = grad.weights.data() + r * first.cols;
    for (std::size_t c = 0; c < first.cols; ++c) {
      if (w[c] > 0.0) {
        gw[c] += dgamma[c];
      } else if (w[c] < 0.0) {
        gw[c] -= dgamma[c];
      }
    }
  }
}

}  // namespace detail

// Objective on a dataset: mean over examples of the summed per-class binary
// cross-entropy, plus entropy_weight * entropy_penalty.
inline double compute_loss(const EntropyLenModel& model, const Dataset& ds,
                           double entropy_weight) {
  double data = 0.0;
  for (std::size_t c = 0; c < model.n_classes(); ++c) {
    AlphaScores scores = model.alpha_scores(c);
    for (const auto& ex : ds.examples) {
      auto t = detail::forward_trace(model.network(c), scores.alpha_tilde, ex.concepts);
      data += detail::bce_from_logit(t.logit, ex.has_label(c) ? 1.0 : 0.0);
    }
  }
  data /= static_cast<double>(ds.size());
  return data + entropy_weight * model.entropy_penalty();
}

// Full-batch (or fixed-order mini-batch) gradient descent with classical
// momentum. Deterministic for a fixed seed; throws NumericalError on a
// non-finite objective.
inline EntropyLenModel train(const Dataset& ds, const TrainConfig& cfg, TrainLog* log = nullptr) {
  cfg.validate();
  ds.validate();
  if (ds.size() == 0) throw UsageError("train: empty dataset");

  EntropyLenModel model(ds.dim(), ds.class_names, cfg.hidden_sizes, cfg.temperature, cfg.seed);
  const std::size_t r = model.n_classes();
  const std::size_t n = ds.size();
  const std::size_t batch = cfg.batch_size == 0 ? n : std::min(cfg.batch_size, n);

  // Momentum buffers, same shapes as the parameters.
  std::vector<detail::ClassGradients> velocity;
  velocity.reserve(r);
  for (std::size_t c = 0; c < r; ++c) velocity.emplace_back(model.network(c));

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(start + batch, n);
      const double inv = 1.0 / static_cast<double>(stop - start);

      for (std::size_t c = 0; c < r; ++c) {
        AlphaScores scores = model.alpha_scores(c);
        detail::ClassGradients grads(model.network(c));
        std::vector<double> d_alpha_tilde(ds.dim(), 0.0);

        for (std::size_t i = start; i < stop; ++i) {
          const auto& ex = ds.examples[i];
          auto t = detail::forward_trace(model.network(c), scores.alpha_tilde, ex.concepts);
          const double y = ex.has_label(c) ? 1.0 : 0.0;
          detail::backward_trace(model.network(c), t, ex.concepts, y, grads, d_alpha_tilde);
        }
        grads.scale(inv);
        for (double& v : d_alpha_tilde) v *= inv;
        detail::apply_gate_chain(model.network(c), scores.alpha, cfg.temperature, d_alpha_tilde,
                                 cfg.entropy_weight, grads);

        ClassNetwork& net = model.network(c);
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
          auto& vel = velocity[c].layers[l];
          auto& grad = grads.layers[l];
          auto& layer = net.layers[l];
          for (std::size_t k = 0; k < layer.weights.size(); ++k) {
            vel.weights[k] = cfg.momentum * vel.weights[k] - cfg.learning_rate * grad.weights[k];
            layer.weights[k] += vel.weights[k];
          }
          for (std::size_t k = 0; k < layer.bias.size(); ++k) {
            vel.bias[k] = cfg.momentum * vel.bias[k] - cfg.learning_rate * grad.bias[k];
            layer.bias[k] += vel.bias[k];
          }
        }
      }
    }

    const double objective = compute_loss(model, ds, cfg.entropy_weight);
    if (!std::isfinite(objective)) {
      throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch + 1) +
                           " (try a smaller learning rate)");
    }
    if (log != nullptr) log->loss_history.push_back(objective);
  }
  return model;
}

// Compares the analytic gradient of the total per-example loss (summed BCE
// over classes + entropy_weight * entropy penalty) against central finite
// differences on a random sample of parameters. Returns the worst relative
// error, |a - f| / max(|a|, |f|, 1e-6).
//
// The loss is piecewise smooth: relu boundaries, the leading-alpha switch in
// the gate normalization, and the L1 column norms all introduce kinks. A
// central difference straddling a kink does not estimate a derivative, so a
// probe whose two evaluations land in different smoothness regions is skipped
// (the usual gradcheck caveat; a whole dead layer over zero biases sits
// exactly on the relu boundary, for example).
inline double gradient_check(const EntropyLenModel& model, const ConceptVector& x,
                             const std::vector<std::uint8_t>& labels, double entropy_weight = 0.1,
                             std::size_t max_params = 60, std::uint64_t seed = 0,
                             bool include_bce = true) {
  EntropyLenModel work = model;
  const std::size_t r = work.n_classes();

  // Loss plus a signature of the smoothness region: relu activation pattern,
  // alpha leader, and first-layer weight signs (the L1 kink set).
  auto loss_at = [&](std::string* region) {
    double total = 0.0;
    for (std::size_t c = 0; c < r; ++c) {
      AlphaScores scores = work.alpha_scores(c);
      if (include_bce) {
        auto t = detail::forward_trace(work.network(c), scores.alpha_tilde, x);
        total += detail::bce_from_logit(t.logit, labels[c] ? 1.0 : 0.0);
        if (region != nullptr) {
          const auto lead = std::max_element(scores.alpha.begin(), scores.alpha.end());
          region->push_back(static_cast<char>('0' + (lead - scores.alpha.begin())));
          for (std::size_t l = 0; l + 1 < t.pre.size(); ++l) {
            for (double v : t.pre[l]) region->push_back(v > 0.0 ? '1' : '0');
          }
        }
      }
      if (region != nullptr) {
        for (double w : work.network(c).layers[0].weights) {
          region->push_back(w > 0.0 ? '+' : (w < 0.0 ? '-' : '0'));
        }
      }
    }
    return total + entropy_weight * work.entropy_penalty();
  };

  // Analytic gradients for every class.
  std::vector<detail::ClassGradients> grads;
  for (std::size_t c = 0; c < r; ++c) {
    grads.emplace_back(work.network(c));
    std::vector<double> d_alpha_tilde(work.dim(), 0.0);
    AlphaScores scores = work.alpha_scores(c);
    if (include_bce) {
      auto t = detail::forward_trace(work.network(c), scores.alpha_tilde, x);
      detail::backward_trace(work.network(c), t, x, labels[c] ? 1.0 : 0.0, grads[c],
                             d_alpha_tilde);
    }
    detail::apply_gate_chain(work.network(c), scores.alpha, work.tau(), d_alpha_tilde,
                             entropy_weight, grads[c]);
  }

  // Flat index over (class, layer, weight-or-bias, offset).
  struct ParamRef {
    std::size_t cls, layer, offset;
    bool is_bias;
  };
  std::vector<ParamRef> params;
  for (std::size_t c = 0; c < r; ++c) {
    for (std::size_t l = 0; l < work.network(c).layers.size(); ++l) {
      const auto& layer = work.network(c).layers[l];
      for (std::size_t k = 0; k < layer.weights.size(); ++k) params.push_back({c, l, k, false});
      for (std::size_t k = 0; k < layer.bias.size(); ++k) params.push_back({c, l, k, true});
    }
  }
  Rng rng = Rng(seed).split("gradient-check");
  rng.shuffle(params);
  if (params.size() > max_params) params.resize(max_params);

  const double h = 1e-5;
  double worst = 0.0;
  for (const auto& p : params) {
    double& w = p.is_bias ? work.network(p.cls).layers[p.layer].bias[p.offset]
                          : work.network(p.cls).layers[p.layer].weights[p.offset];
    const double saved = w;
    std::string up_region, down_region;
    w = saved + h;
    const double up = loss_at(&up_region);
    w = saved - h;
    const double down = loss_at(&down_region);
    w = saved;
    if (up_region != down_region) continue;  // probe crosses a kink

    const double fd = (up - down) / (2.0 * h);
    const double analytic = p.is_bias ? grads[p.cls].layers[p.layer].bias[p.offset]
                                      : grads[p.cls].layers[p.layer].weights[p.offset];
    const double err = std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), 1e-6});
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace lenp
