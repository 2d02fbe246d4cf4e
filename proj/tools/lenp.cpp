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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lenp/bias.hpp"
#include "lenp/dataset.hpp"
#include "lenp/errors.hpp"
#include "lenp/eval.hpp"
#include "lenp/explain.hpp"
#include "lenp/forest.hpp"
#include "lenp/metrics.hpp"
#include "lenp/model.hpp"
#include "lenp/report.hpp"
#include "lenp/surrogate.hpp"
#include "lenp/synthetic.hpp"
#include "lenp/train.hpp"

namespace {

using nlohmann::json;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("LENP_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw lenp::UsageError("LENP_SEED must be an unsigned integer");
    }
  }
  return 0;
}

json load_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw lenp::UsageError(std::string(what) + ": cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw lenp::UsageError(std::string(what) + ": malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

// Fills options the user left at their default from a JSON config file, so a
// run is reproducible from the captured config alone.
class ConfigLayer {
 public:
  ConfigLayer(CLI::App* cmd, const std::string* path) : cmd_(cmd), path_(path) {}

  void load() {
    if (path_ != nullptr && !path_->empty()) cfg_ = load_json_file(*path_, "config");
  }

  template <typename T>
  void apply(const std::string& flag, const std::string& key, T& var) {
    if (cfg_.contains(key) && cmd_->count(flag) == 0) var = cfg_.at(key).get<T>();
  }

 private:
  CLI::App* cmd_;
  const std::string* path_;
  json cfg_;
};

void write_config_capture(const std::string& outdir, const std::string& name, const json& j) {
  std::filesystem::create_directories(outdir);
  std::ofstream out(outdir + "/" + name);
  if (!out) throw lenp::UsageError("cannot write config capture in " + outdir);
  out << j.dump(2) << "\n";
}

lenp::Dataset load_encoded(const std::string& data_path, const std::string& vocab_path,
                           std::size_t max_features, std::size_t min_df) {
  auto docs = lenp::read_jsonl(data_path);
  lenp::Vocabulary vocab;
  if (!vocab_path.empty()) {
    vocab = lenp::load_vocabulary(vocab_path);
  } else {
    std::vector<std::vector<std::string>> token_docs;
    token_docs.reserve(docs.size());
    for (const auto& d : docs) token_docs.push_back(lenp::tokenize(d.text));
    vocab = lenp::build_vocabulary(token_docs, max_features, min_df);
  }
  return lenp::make_dataset(docs, vocab);
}

std::size_t resolve_class(const lenp::Dataset& ds, const std::string& name) {
  const int cls = ds.class_id(name);
  if (cls < 0) throw lenp::UsageError("unknown class: " + name);
  return static_cast<std::size_t>(cls);
}

lenp::LocalMode parse_strategy(const std::string& s) {
  if (s == "len") return lenp::LocalMode::kLen;
  if (s == "lenp") return lenp::LocalMode::kLenp;
  throw lenp::UsageError("strategy must be len or lenp");
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string input, synthetic, outdir, config;
  std::size_t docs = 1200;
  std::size_t max_features = 200;
  std::size_t min_df = 1;
  std::uint64_t seed = 0;
};

int cmd_ingest(const IngestArgs& a) {
  std::vector<lenp::RawDocument> docs;
  if (!a.input.empty()) {
    docs = lenp::read_jsonl(a.input);
  } else if (a.synthetic == "tags") {
    lenp::TagsSpec spec;
    spec.n_docs = a.docs;
    spec.seed = a.seed;
    docs = lenp::make_tags_corpus(spec);
  } else if (a.synthetic == "faithfulness") {
    lenp::FaithfulnessSpec spec;
    spec.n_docs = a.docs;
    spec.seed = a.seed;
    docs = lenp::make_faithfulness_corpus(spec);
  } else if (a.synthetic == "and") {
    lenp::Dataset and_ds = lenp::make_and_dataset(a.docs, 10, a.seed);
    for (const auto& ex : and_ds.examples) {
      lenp::RawDocument doc;
      for (std::size_t j = 0; j < ex.concepts.size(); ++j) {
        if (lenp::concept_true(ex.concepts[j])) {
          doc.text += (doc.text.empty() ? "" : " ") + and_ds.vocabulary.term(static_cast<int>(j));
        }
      }
      if (ex.labels[0]) doc.labels.push_back("both");
      docs.push_back(std::move(doc));
    }
  } else {
    throw lenp::UsageError("ingest: pass --input FILE or --synthetic tags|faithfulness|and");
  }

  std::vector<std::vector<std::string>> token_docs;
  token_docs.reserve(docs.size());
  for (const auto& d : docs) token_docs.push_back(lenp::tokenize(d.text));
  lenp::Vocabulary vocab = lenp::build_vocabulary(token_docs, a.max_features, a.min_df);
  lenp::Dataset ds = lenp::make_dataset(docs, vocab);
  ds.validate();

  std::filesystem::create_directories(a.outdir);
  lenp::write_jsonl(docs, a.outdir + "/corpus.jsonl");
  lenp::save_vocabulary(vocab, a.outdir + "/vocab.json");
  write_config_capture(a.outdir, "ingest_config.json",
                       json{{"input", a.input},
                            {"synthetic", a.synthetic},
                            {"docs", a.docs},
                            {"max_features", a.max_features},
                            {"min_df", a.min_df},
                            {"seed", a.seed}});

  json stats{{"documents", ds.size()},
             {"vocabulary", vocab.size()},
             {"classes", ds.class_names}};
  std::cout << stats.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string data, vocab, outdir, config, forest_path;
  std::size_t max_features = 200, min_df = 1;
  double lr = 1e-2, lambda = 0.1, tau = 1.0, momentum = 0.9;
  std::size_t epochs = 200, batch = 0;
  std::vector<std::size_t> hidden = {20, 20};
  double val_frac = 0.1, test_frac = 0.1;
  std::uint64_t seed = 0, split_seed = 0;
  bool explain_blackbox = false;
  std::size_t trees = 50, depth = 8;
  double feature_subsample = 0.5;
};

int cmd_train(const TrainArgs& a) {
  lenp::Dataset ds = load_encoded(a.data, a.vocab, a.max_features, a.min_df);
  lenp::SplitFractions fractions{1.0 - a.val_frac - a.test_frac, a.val_frac, a.test_frac};
  auto [train_ds, val_ds, test_ds] = lenp::split(ds, fractions, a.split_seed);

  std::filesystem::create_directories(a.outdir);
  std::string vocab_path = a.vocab;
  if (vocab_path.empty()) {
    vocab_path = a.outdir + "/vocab.json";
    lenp::save_vocabulary(ds.vocabulary, vocab_path);
  }

  lenp::Dataset fit_ds = train_ds;
  if (a.explain_blackbox) {
    lenp::Forest forest;
    if (!a.forest_path.empty()) {
      forest = lenp::load_forest(a.forest_path);
    } else {
      lenp::ForestConfig fcfg;
      fcfg.n_trees = a.trees;
      fcfg.max_depth = a.depth;
      fcfg.feature_subsample = a.feature_subsample;
      fcfg.seed = a.seed;
      forest = lenp::fit_forest(train_ds, fcfg);
    }
    lenp::save_forest(forest, a.outdir + "/forest.json");
    fit_ds = lenp::relabel(train_ds,
                           [&](const lenp::ConceptVector& x) { return predict_proba(forest, x); });
  }

  lenp::TrainConfig cfg;
  cfg.learning_rate = a.lr;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.entropy_weight = a.lambda;
  cfg.temperature = a.tau;
  cfg.hidden_sizes = a.hidden;
  cfg.momentum = a.momentum;
  cfg.seed = a.seed;

  lenp::TrainLog log;
  lenp::EntropyLenModel model = lenp::train(fit_ds, cfg, &log);
  model.set_vocab_ref(vocab_path);
  model.save(a.outdir + "/model.json");

  const auto predict = [&](const lenp::ConceptVector& x) { return model.forward(x); };
  const lenp::MultilabelScores val_scores = lenp::multilabel_scores(predict, val_ds);
  const lenp::MultilabelScores test_scores = lenp::multilabel_scores(predict, test_ds);

  json train_log{{"loss_history", log.loss_history},
                 {"final_loss", log.loss_history.back()},
                 {"val", {{"f1", val_scores.f1}, {"jaccard", val_scores.jaccard},
                          {"precision", val_scores.precision}, {"recall", val_scores.recall}}},
                 {"test", {{"f1", test_scores.f1}, {"jaccard", test_scores.jaccard},
                           {"precision", test_scores.precision}, {"recall", test_scores.recall}}}};
  std::ofstream(a.outdir + "/train_log.json") << train_log.dump(2) << "\n";

  write_config_capture(a.outdir, "train_config.json",
                       json{{"data", a.data},
                            {"vocab", vocab_path},
                            {"max_features", a.max_features},
                            {"min_df", a.min_df},
                            {"lr", a.lr},
                            {"epochs", a.epochs},
                            {"batch", a.batch},
                            {"lambda", a.lambda},
                            {"tau", a.tau},
                            {"hidden", a.hidden},
                            {"momentum", a.momentum},
                            {"seed", a.seed},
                            {"split_seed", a.split_seed},
                            {"val_frac", a.val_frac},
                            {"test_frac", a.test_frac},
                            {"explain_blackbox", a.explain_blackbox},
                            {"forest", a.forest_path},
                            {"trees", a.trees},
                            {"depth", a.depth},
                            {"feature_subsample", a.feature_subsample}});

  std::printf("trained %zu classes, d=%zu: loss %.4f -> %.4f, val f1 %.4f, test f1 %.4f\n",
              model.n_classes(), model.dim(), log.loss_history.front(), log.loss_history.back(),
              val_scores.f1, test_scores.f1);
  return 0;
}

// ---------------------------------------------------------------------------
// explain
// ---------------------------------------------------------------------------

struct ExplainArgs {
  std::string model, data, vocab, cls, strategy = "lenp", agg = "powerset", out;
  std::size_t index = 0;
  std::size_t k = 10;
  double val_frac = 0.1, test_frac = 0.1;
  std::uint64_t split_seed = 0;
  bool global = false;
};

int cmd_explain(const ExplainArgs& a) {
  lenp::EntropyLenModel model = lenp::EntropyLenModel::load(a.model);
  const std::string vocab_path = a.vocab.empty() ? model.vocab_ref() : a.vocab;
  if (vocab_path.empty()) throw lenp::UsageError("explain: no vocabulary (pass --vocab)");
  lenp::Dataset ds = load_encoded(a.data, vocab_path, 0, 1);
  if (ds.n_classes() != model.n_classes()) {
    // Class names can legally differ in order between corpus and model; trust
    // the model, which is what the formulas refer to.
    throw lenp::UsageError("explain: dataset and model disagree on class count");
  }
  ds.class_names = model.class_names();
  const lenp::LocalMode mode = parse_strategy(a.strategy);

  json out;
  if (a.global) {
    if (a.cls.empty()) throw lenp::UsageError("explain global: --class is required");
    const std::size_t cls = resolve_class(ds, a.cls);
    lenp::SplitFractions fractions{1.0 - a.val_frac - a.test_frac, a.val_frac, a.test_frac};
    auto [train_ds, val_ds, test_ds] = lenp::split(ds, fractions, a.split_seed);
    const lenp::AggregationMode agg = a.agg == "greedy" ? lenp::AggregationMode::kGreedy
                                    : a.agg == "powerset"
                                        ? lenp::AggregationMode::kPowerset
                                        : throw lenp::UsageError("agg must be greedy or powerset");
    lenp::GlobalExplanation g = lenp::global_explain(model, train_ds, val_ds, cls, mode, agg, a.k);
    out = lenp::global_explanation_json(g, ds, cls, mode, agg);
  } else {
    if (a.index >= ds.size()) throw lenp::UsageError("explain: --index out of range");
    std::size_t cls;
    if (a.cls.empty()) {
      const std::vector<double> probs = model.forward(ds.examples[a.index].concepts);
      cls = 0;
      for (std::size_t c = 1; c < probs.size(); ++c) {
        if (probs[c] > probs[cls]) cls = c;
      }
    } else {
      cls = resolve_class(ds, a.cls);
    }
    out = lenp::local_explanation_json(model, ds, a.index, cls, mode);
  }

  const std::string payload = out.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << payload;
  } else {
    std::ofstream file(a.out);
    if (!file) throw lenp::UsageError("explain: cannot write " + a.out);
    file << payload;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval-metrics
// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string model, data, vocab, forest, outdir, config, split = "test";
  std::size_t samples = 100, m = 10, perturbations = 10;
  double radius = 0.02;
  bool no_surrogate = false;
  std::size_t surrogate_samples = 1000, top_features = 10;
  double val_frac = 0.1, test_frac = 0.1;
  std::uint64_t seed = 0, split_seed = 0;
  std::size_t threads = 1;
};

int cmd_eval(const EvalArgs& a) {
  lenp::EntropyLenModel model = lenp::EntropyLenModel::load(a.model);
  const std::string vocab_path = a.vocab.empty() ? model.vocab_ref() : a.vocab;
  if (vocab_path.empty()) throw lenp::UsageError("eval-metrics: no vocabulary (pass --vocab)");
  lenp::Dataset ds = load_encoded(a.data, vocab_path, 0, 1);
  ds.class_names = model.class_names();

  lenp::Dataset subject = ds;
  if (a.split != "all") {
    lenp::SplitFractions fractions{1.0 - a.val_frac - a.test_frac, a.val_frac, a.test_frac};
    auto [train_ds, val_ds, test_ds] = lenp::split(ds, fractions, a.split_seed);
    if (a.split == "train") {
      subject = std::move(train_ds);
    } else if (a.split == "val") {
      subject = std::move(val_ds);
    } else if (a.split == "test") {
      subject = std::move(test_ds);
    } else {
      throw lenp::UsageError("eval-metrics: --split must be train|val|test|all");
    }
  }

  lenp::PredictFn predict;
  lenp::Forest forest;
  if (!a.forest.empty()) {
    forest = lenp::load_forest(a.forest);
    predict = [&forest](const lenp::ConceptVector& x) { return predict_proba(forest, x); };
  } else {
    predict = [&model](const lenp::ConceptVector& x) { return model.forward(x); };
  }

  lenp::EvalConfig cfg;
  cfg.n_samples = a.samples;
  cfg.m = a.m;
  cfg.radius = a.radius;
  cfg.n_perturbations = a.perturbations;
  cfg.with_surrogate = !a.no_surrogate;
  cfg.surrogate.n_samples = a.surrogate_samples;
  cfg.surrogate.top_features = a.top_features;
  cfg.seed = a.seed;
  cfg.threads = a.threads;

  const lenp::EvalSummary summary = lenp::evaluate_explanations(model, predict, subject, cfg);
  lenp::write_eval_report(summary, a.outdir);
  write_config_capture(a.outdir, "eval_config.json",
                       json{{"model", a.model},
                            {"data", a.data},
                            {"vocab", vocab_path},
                            {"forest", a.forest},
                            {"split", a.split},
                            {"samples", a.samples},
                            {"m", a.m},
                            {"radius", a.radius},
                            {"perturbations", a.perturbations},
                            {"surrogate", !a.no_surrogate},
                            {"surrogate_samples", a.surrogate_samples},
                            {"top_features", a.top_features},
                            {"seed", a.seed},
                            {"split_seed", a.split_seed},
                            {"threads", a.threads}});

  for (const auto& [name, ci] : summary.auc) {
    std::printf("%-10s auc_morf %.4f +/- %.4f   max_sens %.4f +/- %.4f\n", name.c_str(), ci.mean,
                ci.half_width, summary.sens.at(name).mean, summary.sens.at(name).half_width);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// bias-exp
// ---------------------------------------------------------------------------

struct BiasArgs {
  std::string setting = "s1", outdir, config;
  std::size_t trials = 20;
  std::size_t docs = 1200;
  std::size_t keywords = 5;
  double p_keyword = 0.55;
  double max_df = 1.0;
  std::size_t epochs = 200;
  double lr = 1e-2, lambda = 0.1, tau = 1.0;
  std::size_t k = 10;
  double gap = -1.0, p_target = -1.0, p_other = -1.0;
  std::size_t retry_cap = 50;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

int cmd_bias(const BiasArgs& a) {
  lenp::BiasSetting setting;
  if (a.setting == "s1" || a.setting == "S1") {
    setting = lenp::bias_setting_s1();
  } else if (a.setting == "s2" || a.setting == "S2") {
    setting = lenp::bias_setting_s2();
  } else {
    throw lenp::UsageError("bias-exp: --setting must be s1 or s2");
  }
  if (a.gap > 0) setting.f1_gap_threshold = a.gap;
  if (a.p_target > 0) setting.p_target = a.p_target;
  if (a.p_other >= 0) setting.p_other = a.p_other;

  lenp::BiasConfig cfg;
  cfg.corpus.n_docs = a.docs;
  cfg.corpus.keywords_per_class = a.keywords;
  cfg.corpus.p_keyword = a.p_keyword;
  cfg.max_doc_freq = a.max_df;
  cfg.train.epochs = a.epochs;
  cfg.train.learning_rate = a.lr;
  cfg.train.entropy_weight = a.lambda;
  cfg.train.temperature = a.tau;
  cfg.k = a.k;
  cfg.retry_cap = a.retry_cap;

  const lenp::BiasSuiteResult result =
      lenp::run_bias_suite(setting, cfg, a.trials, a.seed, a.threads);
  lenp::write_bias_report(result, a.outdir);
  write_config_capture(a.outdir, "bias_config_" + setting.name + ".json",
                       json{{"setting", setting.name},
                            {"trials", a.trials},
                            {"docs", a.docs},
                            {"keywords", a.keywords},
                            {"p_keyword", a.p_keyword},
                            {"max_df", a.max_df},
                            {"epochs", a.epochs},
                            {"lr", a.lr},
                            {"lambda", a.lambda},
                            {"tau", a.tau},
                            {"k", a.k},
                            {"gap", setting.f1_gap_threshold},
                            {"p_target", setting.p_target},
                            {"p_other", setting.p_other},
                            {"retry_cap", a.retry_cap},
                            {"seed", a.seed},
                            {"threads", a.threads}});
  std::cout << lenp::bias_table_text(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logic Explained Networks with perturbation-refined explanations"};
  app.require_subcommand(1);

  IngestArgs ingest;
  TrainArgs train;
  ExplainArgs explain;
  EvalArgs eval;
  BiasArgs bias;
  std::string report_dir;

  try {
    const std::uint64_t seed0 = default_seed();
    ingest.seed = train.seed = eval.seed = bias.seed = seed0;
    train.split_seed = explain.split_seed = eval.split_seed = seed0;
  } catch (const lenp::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App* c_ingest = app.add_subcommand("ingest", "Build corpus + vocabulary artifacts");
  c_ingest->add_option("--input", ingest.input, "JSONL corpus ({\"text\",\"labels\"} per line)");
  c_ingest->add_option("--synthetic", ingest.synthetic, "Generate: tags|faithfulness|and");
  c_ingest->add_option("--docs", ingest.docs, "Synthetic corpus size");
  c_ingest->add_option("--outdir", ingest.outdir, "Output directory")->required();
  c_ingest->add_option("--max-features", ingest.max_features, "Vocabulary cap");
  c_ingest->add_option("--min-df", ingest.min_df, "Minimum document frequency");
  c_ingest->add_option("--seed", ingest.seed, "Random seed");
  c_ingest->add_option("--config", ingest.config, "JSON config with defaults");

  CLI::App* c_train = app.add_subcommand("train", "Train an entropy-gated network");
  c_train->add_option("--data", train.data, "JSONL corpus")->required();
  c_train->add_option("--vocab", train.vocab, "Vocabulary JSON (else derived)");
  c_train->add_option("--outdir", train.outdir, "Output directory")->required();
  c_train->add_option("--max-features", train.max_features, "Vocabulary cap when deriving");
  c_train->add_option("--min-df", train.min_df, "Minimum document frequency when deriving");
  c_train->add_option("--lr", train.lr, "Learning rate");
  c_train->add_option("--epochs", train.epochs, "Training epochs");
  c_train->add_option("--batch", train.batch, "Batch size (0 = full batch)");
  c_train->add_option("--lambda", train.lambda, "Entropy penalty weight");
  c_train->add_option("--tau", train.tau, "Gate softmax temperature");
  c_train->add_option("--hidden", train.hidden, "Hidden layer sizes");
  c_train->add_option("--momentum", train.momentum, "Momentum coefficient");
  c_train->add_option("--seed", train.seed, "Random seed");
  c_train->add_option("--split-seed", train.split_seed, "Train/val/test shuffle seed");
  c_train->add_option("--val-frac", train.val_frac, "Validation fraction");
  c_train->add_option("--test-frac", train.test_frac, "Test fraction");
  c_train->add_flag("--explain-blackbox", train.explain_blackbox,
                    "Distill from a random forest instead of the labels");
  c_train->add_option("--forest", train.forest_path, "Reuse a saved forest");
  c_train->add_option("--trees", train.trees, "Forest size when fitting");
  c_train->add_option("--depth", train.depth, "Forest max depth when fitting");
  c_train->add_option("--feature-subsample", train.feature_subsample,
                      "Forest per-node feature fraction");
  c_train->add_option("--config", train.config, "JSON config with defaults");

  CLI::App* c_explain = app.add_subcommand("explain", "Extract local or global explanations");
  CLI::App* c_local = c_explain->add_subcommand("local", "One sample");
  CLI::App* c_global = c_explain->add_subcommand("global", "One class");
  c_explain->require_subcommand(1);
  for (CLI::App* c : {c_local, c_global}) {
    c->add_option("--model", explain.model, "Model JSON")->required();
    c->add_option("--data", explain.data, "JSONL corpus")->required();
    c->add_option("--vocab", explain.vocab, "Vocabulary JSON (default: model's reference)");
    c->add_option("--class", explain.cls, "Class name");
    c->add_option("--strategy", explain.strategy, "len|lenp");
    c->add_option("--out", explain.out, "Write JSON here instead of stdout");
  }
  c_local->add_option("--index", explain.index, "Sample line number (0-based)");
  c_global->add_option("--agg", explain.agg, "greedy|powerset");
  c_global->add_option("--k", explain.k, "Top-k candidate clauses");
  c_global->add_option("--split-seed", explain.split_seed, "Train/val/test shuffle seed");
  c_global->add_option("--val-frac", explain.val_frac, "Validation fraction");
  c_global->add_option("--test-frac", explain.test_frac, "Test fraction");

  CLI::App* c_eval = app.add_subcommand("eval-metrics", "Faithfulness + sensitivity metrics");
  c_eval->add_option("--model", eval.model, "Model JSON")->required();
  c_eval->add_option("--data", eval.data, "JSONL corpus")->required();
  c_eval->add_option("--vocab", eval.vocab, "Vocabulary JSON (default: model's reference)");
  c_eval->add_option("--forest", eval.forest, "Explain this forest instead of the model");
  c_eval->add_option("--outdir", eval.outdir, "Output directory")->required();
  c_eval->add_option("--split", eval.split, "train|val|test|all");
  c_eval->add_option("--samples", eval.samples, "Inputs to explain");
  c_eval->add_option("--m", eval.m, "MoRF steps per input");
  c_eval->add_option("--radius", eval.radius, "Sensitivity perturbation radius");
  c_eval->add_option("--perturbations", eval.perturbations, "Sensitivity draws per input");
  c_eval->add_flag("--no-surrogate", eval.no_surrogate, "Skip the linear surrogate baseline");
  c_eval->add_option("--surrogate-samples", eval.surrogate_samples, "Surrogate fit sample size");
  c_eval->add_option("--top-features", eval.top_features, "Surrogate weights kept");
  c_eval->add_option("--seed", eval.seed, "Random seed");
  c_eval->add_option("--split-seed", eval.split_seed, "Train/val/test shuffle seed");
  c_eval->add_option("--val-frac", eval.val_frac, "Validation fraction");
  c_eval->add_option("--test-frac", eval.test_frac, "Test fraction");
  c_eval->add_option("--threads", eval.threads, "Worker threads");
  c_eval->add_option("--config", eval.config, "JSON config with defaults");

  CLI::App* c_bias = app.add_subcommand("bias-exp", "Noisy-feature detection experiment");
  c_bias->add_option("--setting", bias.setting, "s1|s2");
  c_bias->add_option("--trials", bias.trials, "Number of trials");
  c_bias->add_option("--outdir", bias.outdir, "Output directory")->required();
  c_bias->add_option("--docs", bias.docs, "Corpus size per trial");
  c_bias->add_option("--keywords", bias.keywords, "Keywords per class (1-5)");
  c_bias->add_option("--p-keyword", bias.p_keyword, "Class keyword strength");
  c_bias->add_option("--max-df", bias.max_df, "Drop tokens above this document frequency");
  c_bias->add_option("--epochs", bias.epochs, "Training epochs per trial");
  c_bias->add_option("--lr", bias.lr, "Learning rate");
  c_bias->add_option("--lambda", bias.lambda, "Entropy penalty weight");
  c_bias->add_option("--tau", bias.tau, "Gate softmax temperature");
  c_bias->add_option("--k", bias.k, "Top-k candidate clauses");
  c_bias->add_option("--gap", bias.gap, "Override the F1-gap threshold");
  c_bias->add_option("--p-target", bias.p_target, "Override noise rate on the target class");
  c_bias->add_option("--p-other", bias.p_other, "Override noise rate elsewhere");
  c_bias->add_option("--retry-cap", bias.retry_cap, "Attempts per trial to get a biased model");
  c_bias->add_option("--seed", bias.seed, "Random seed");
  c_bias->add_option("--threads", bias.threads, "Worker threads");
  c_bias->add_option("--config", bias.config, "JSON config with defaults");

  CLI::App* c_report = app.add_subcommand("report", "Consolidate a run directory");
  c_report->add_option("--run", report_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_ingest) {
      ConfigLayer layer(c_ingest, &ingest.config);
      layer.load();
      layer.apply("--input", "input", ingest.input);
      layer.apply("--synthetic", "synthetic", ingest.synthetic);
      layer.apply("--docs", "docs", ingest.docs);
      layer.apply("--max-features", "max_features", ingest.max_features);
      layer.apply("--min-df", "min_df", ingest.min_df);
      layer.apply("--seed", "seed", ingest.seed);
      return cmd_ingest(ingest);
    }
    if (*c_train) {
      ConfigLayer layer(c_train, &train.config);
      layer.load();
      layer.apply("--data", "data", train.data);
      layer.apply("--vocab", "vocab", train.vocab);
      layer.apply("--max-features", "max_features", train.max_features);
      layer.apply("--min-df", "min_df", train.min_df);
      layer.apply("--lr", "lr", train.lr);
      layer.apply("--epochs", "epochs", train.epochs);
      layer.apply("--batch", "batch", train.batch);
      layer.apply("--lambda", "lambda", train.lambda);
      layer.apply("--tau", "tau", train.tau);
      layer.apply("--hidden", "hidden", train.hidden);
      layer.apply("--momentum", "momentum", train.momentum);
      layer.apply("--seed", "seed", train.seed);
      layer.apply("--split-seed", "split_seed", train.split_seed);
      layer.apply("--val-frac", "val_frac", train.val_frac);
      layer.apply("--test-frac", "test_frac", train.test_frac);
      layer.apply("--explain-blackbox", "explain_blackbox", train.explain_blackbox);
      layer.apply("--forest", "forest", train.forest_path);
      layer.apply("--trees", "trees", train.trees);
      layer.apply("--depth", "depth", train.depth);
      layer.apply("--feature-subsample", "feature_subsample", train.feature_subsample);
      return cmd_train(train);
    }
    if (*c_explain) {
      explain.global = c_global->parsed();
      return cmd_explain(explain);
    }
    if (*c_eval) {
      ConfigLayer layer(c_eval, &eval.config);
      layer.load();
      layer.apply("--forest", "forest", eval.forest);
      layer.apply("--split", "split", eval.split);
      layer.apply("--samples", "samples", eval.samples);
      layer.apply("--m", "m", eval.m);
      layer.apply("--radius", "radius", eval.radius);
      layer.apply("--perturbations", "perturbations", eval.perturbations);
      layer.apply("--surrogate-samples", "surrogate_samples", eval.surrogate_samples);
      layer.apply("--top-features", "top_features", eval.top_features);
      layer.apply("--seed", "seed", eval.seed);
      layer.apply("--split-seed", "split_seed", eval.split_seed);
      layer.apply("--threads", "threads", eval.threads);
      return cmd_eval(eval);
    }
    if (*c_bias) {
      ConfigLayer layer(c_bias, &bias.config);
      layer.load();
      layer.apply("--setting", "setting", bias.setting);
      layer.apply("--trials", "trials", bias.trials);
      layer.apply("--docs", "docs", bias.docs);
      layer.apply("--keywords", "keywords", bias.keywords);
      layer.apply("--p-keyword", "p_keyword", bias.p_keyword);
      layer.apply("--max-df", "max_df", bias.max_df);
      layer.apply("--epochs", "epochs", bias.epochs);
      layer.apply("--lr", "lr", bias.lr);
      layer.apply("--lambda", "lambda", bias.lambda);
      layer.apply("--tau", "tau", bias.tau);
      layer.apply("--k", "k", bias.k);
      layer.apply("--gap", "gap", bias.gap);
      layer.apply("--p-target", "p_target", bias.p_target);
      layer.apply("--p-other", "p_other", bias.p_other);
      layer.apply("--retry-cap", "retry_cap", bias.retry_cap);
      layer.apply("--seed", "seed", bias.seed);
      layer.apply("--threads", "threads", bias.threads);
      return cmd_bias(bias);
    }
    if (*c_report) {
      lenp::consolidate_report(report_dir);
      std::ifstream in(report_dir + "/report.txt");
      std::cout << in.rdbuf();
      return 0;
    }
  } catch (const lenp::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const lenp::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
