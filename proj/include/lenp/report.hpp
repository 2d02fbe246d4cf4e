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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lenp/bias.hpp"
#include "lenp/errors.hpp"
#include "lenp/eval.hpp"
#include "lenp/svg.hpp"

namespace lenp {

namespace detail {

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw UsageError("report: cannot write " + path);
  out << content;
}

inline nlohmann::json to_json(const MeanCi& m) {
  return {{"mean", m.mean}, {"ci95", m.half_width}, {"n", m.n}};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Explanation payloads shared by the CLI and tests.
// ---------------------------------------------------------------------------

// Local explanation of one example: the predicted tags, the formula, and one
// annotation line per discarded bad term.
inline nlohmann::json local_explanation_json(const EntropyLenModel& model, const Dataset& ds,
                                             std::size_t index, std::size_t cls, LocalMode mode) {
  if (index >= ds.size()) throw UsageError("explain: sample index out of range");
  const auto& ex = ds.examples[index];
  const LocalExplanation e = local_explain(model, ex.concepts, cls, mode);

  std::vector<std::string> predicted;
  const std::vector<double> probs = model.forward(ex.concepts);
  for (std::size_t c = 0; c < probs.size(); ++c) {
    if (probs[c] >= model.theta()) predicted.push_back(ds.class_names[c]);
  }
  std::vector<std::string> good, bad, annotations;
  for (const auto& lit : e.good.literals()) good.push_back(to_string(lit, ds.vocabulary));
  for (const auto& lit : e.bad) {
    bad.push_back(to_string(lit, ds.vocabulary));
    annotations.push_back("(" + to_string(lit, ds.vocabulary) + " is a bad term, discarded)");
  }
  return {{"text", ex.raw_text},
          {"sample", index},
          {"predicted_tags", predicted},
          {"class", ds.class_names[cls]},
          {"strategy", to_string(mode)},
          {"prediction", e.prediction},
          {"explanation", to_string(e.good, ds.vocabulary)},
          {"good_terms", good},
          {"bad_terms", bad},
          {"annotations", annotations}};
}

inline nlohmann::json global_explanation_json(const GlobalExplanation& g, const Dataset& ds,
                                              std::size_t cls, LocalMode mode,
                                              AggregationMode agg) {
  nlohmann::json candidates = nlohmann::json::array();
  for (const auto& [clause, count] : g.candidates) {
    candidates.push_back({{"clause", to_string(clause, ds.vocabulary)},
                          {"count", count},
                          {"clause_json", to_json(clause)}});
  }
  return {{"class", ds.class_names[cls]},
          {"strategy", to_string(mode)},
          {"aggregation", to_string(agg)},
          {"formula", to_string(g.formula, ds.vocabulary)},
          {"formula_json", to_json(g.formula)},
          {"validation_accuracy", g.accuracy},
          {"candidates", candidates}};
}

// ---------------------------------------------------------------------------
// Faithfulness / sensitivity evaluation artifacts.
// ---------------------------------------------------------------------------

inline std::string eval_rows_csv(const std::vector<EvalRow>& rows) {
  std::string out = "sample_id,strategy,auc_morf,max_sens\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%s,%.10g,%.10g\n", r.sample_id, r.strategy.c_str(),
                  r.auc_morf, r.max_sens);
    out += buf;
  }
  return out;
}

inline std::vector<EvalRow> parse_eval_rows_csv(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line) || line != "sample_id,strategy,auc_morf,max_sens") {
    throw UsageError("report: unrecognized csv header");
  }
  std::vector<EvalRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    EvalRow r;
    std::istringstream fields(line);
    std::string cell;
    if (!std::getline(fields, cell, ',')) throw UsageError("report: bad csv row");
    r.sample_id = std::stoul(cell);
    if (!std::getline(fields, r.strategy, ',')) throw UsageError("report: bad csv row");
    if (!std::getline(fields, cell, ',')) throw UsageError("report: bad csv row");
    r.auc_morf = std::stod(cell);
    if (!std::getline(fields, cell, ',')) throw UsageError("report: bad csv row");
    r.max_sens = std::stod(cell);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline nlohmann::json eval_summary_json(const EvalSummary& summary) {
  nlohmann::json strategies = nlohmann::json::object();
  for (const auto& [name, ci] : summary.auc) {
    strategies[name] = {{"auc_morf", detail::to_json(ci)},
                        {"max_sens", detail::to_json(summary.sens.at(name))},
                        {"mean_curve", summary.mean_curves.at(name)}};
  }
  return {{"format", "lenp-eval-v1"}, {"strategies", strategies}};
}

inline std::string morf_curves_svg(const EvalSummary& summary) {
  std::vector<SvgSeries> series;
  for (const auto& [name, curve] : summary.mean_curves) {
    series.push_back({name, curve});
  }
  return svg_line_chart("Mean MoRF curves", "features perturbed (most relevant first)",
                        "class probability", series);
}

// Writes eval_rows.csv, eval_summary.json, and morf_curves.svg into dir.
inline void write_eval_report(const EvalSummary& summary, const std::string& dir) {
  std::filesystem::create_directories(dir);
  detail::write_text_file(dir + "/eval_rows.csv", eval_rows_csv(summary.rows));
  detail::write_text_file(dir + "/eval_summary.json", eval_summary_json(summary).dump(2) + "\n");
  detail::write_text_file(dir + "/morf_curves.svg", morf_curves_svg(summary));
}

// ---------------------------------------------------------------------------
// Bias experiment artifacts.
// ---------------------------------------------------------------------------

inline nlohmann::json bias_result_json(const BiasSuiteResult& result) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : result.records) {
    records.push_back({{"trial_seed", r.trial_seed},
                       {"accepted_seed", r.accepted_seed},
                       {"attempts", r.attempts},
                       {"biased", r.biased},
                       {"f1_val", r.f1_val},
                       {"f1_test", r.f1_test},
                       {"detected_len", r.detected_len},
                       {"detected_lenp", r.detected_lenp},
                       {"detected_surrogate", r.detected_surrogate},
                       {"formula_len", r.formula_len},
                       {"formula_lenp", r.formula_lenp}});
  }
  return {{"format", "lenp-bias-v1"},
          {"setting",
           {{"name", result.setting.name},
            {"noise_count", result.setting.noise_count},
            {"p_target", result.setting.p_target},
            {"p_other", result.setting.p_other},
            {"f1_gap_threshold", result.setting.f1_gap_threshold}}},
          {"n_trials", result.records.size()},
          {"biased_runs", result.biased_runs},
          {"rates",
           {{"len_greedy", detail::to_json(result.rate_len)},
            {"lenp_powerset", detail::to_json(result.rate_lenp)},
            {"surrogate_global", detail::to_json(result.rate_surrogate)}}},
          {"records", std::move(records)}};
}

inline std::string bias_table_text(const BiasSuiteResult& result) {
  char buf[128];
  std::string out = "Bias detection, setting " + result.setting.name + " (" +
                    std::to_string(result.biased_runs) + " biased runs of " +
                    std::to_string(result.records.size()) + " trials)\n";
  out += "strategy            detection rate\n";
  const auto row = [&](const char* name, const MeanCi& ci) {
    std::snprintf(buf, sizeof buf, "%-18s  %5.1f%% +/- %.1f%%\n", name, 100.0 * ci.mean,
                  100.0 * ci.half_width);
    out += buf;
  };
  row("LEN (greedy)", result.rate_len);
  row("LEN^p (power set)", result.rate_lenp);
  row("surrogate (global)", result.rate_surrogate);
  return out;
}

inline std::string bias_rates_svg(const BiasSuiteResult& result) {
  return svg_bar_chart("Noisy-feature detection, " + result.setting.name, "detection rate",
                       {{"LEN (greedy)", result.rate_len.mean, result.rate_len.half_width},
                        {"LEN^p (power set)", result.rate_lenp.mean, result.rate_lenp.half_width},
                        {"surrogate", result.rate_surrogate.mean,
                         result.rate_surrogate.half_width}});
}

inline void write_bias_report(const BiasSuiteResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string tag = result.setting.name;
  detail::write_text_file(dir + "/bias_" + tag + ".json", bias_result_json(result).dump(2) + "\n");
  detail::write_text_file(dir + "/bias_" + tag + ".txt", bias_table_text(result));
  detail::write_text_file(dir + "/bias_" + tag + ".svg", bias_rates_svg(result));
}

// ---------------------------------------------------------------------------
// Consolidated report over a run directory.
// ---------------------------------------------------------------------------

// Re-derives per-strategy means from the raw per-sample CSV, merges any bias
// results found, and emits report.json + report.txt (+ bar charts). Fails if
// the directory contains nothing to report on.
inline nlohmann::json consolidate_report(const std::string& run_dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(run_dir)) throw UsageError("report: not a directory: " + run_dir);

  nlohmann::json report{{"format", "lenp-report-v1"}};
  bool found = false;

  const fs::path csv_path = fs::path(run_dir) / "eval_rows.csv";
  if (fs::exists(csv_path)) {
    std::ifstream in(csv_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto rows = parse_eval_rows_csv(buffer.str());
    std::map<std::string, std::vector<double>> auc, sens;
    for (const auto& r : rows) {
      auc[r.strategy].push_back(r.auc_morf);
      sens[r.strategy].push_back(r.max_sens);
    }
    nlohmann::json strategies = nlohmann::json::object();
    std::vector<SvgBar> bars;
    for (const auto& [name, values] : auc) {
      const MeanCi a = mean_ci(values);
      strategies[name] = {{"auc_morf", detail::to_json(a)},
                          {"max_sens", detail::to_json(mean_ci(sens[name]))}};
      bars.push_back({name, a.mean, a.half_width});
    }
    report["faithfulness"] = {{"n_rows", rows.size()}, {"strategies", strategies}};
    detail::write_text_file(run_dir + "/report_auc.svg",
                            svg_bar_chart("Mean AUC-MoRF by strategy", "AUC-MoRF", bars));
    found = true;
  }

  nlohmann::json bias = nlohmann::json::object();
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("bias_", 0) == 0 && entry.path().extension() == ".json") {
      std::ifstream in(entry.path());
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw UsageError("report: malformed " + name + ": " + e.what());
      }
      bias[j.at("setting").at("name").get<std::string>()] = {
          {"biased_runs", j.at("biased_runs")}, {"rates", j.at("rates")}};
      found = true;
    }
  }
  if (!bias.empty()) report["bias"] = std::move(bias);

  if (!found) throw UsageError("report: no eval or bias artifacts in " + run_dir);

  std::string text = "Run report: " + run_dir + "\n";
  if (report.contains("faithfulness")) {
    text += "\nFaithfulness (lower AUC-MoRF = more faithful):\n";
    char buf[160];
    for (const auto& [name, s] : report["faithfulness"]["strategies"].items()) {
      std::snprintf(buf, sizeof buf, "  %-10s auc_morf %.4f +/- %.4f   max_sens %.4f +/- %.4f\n",
                    name.c_str(), s["auc_morf"]["mean"].get<double>(),
                    s["auc_morf"]["ci95"].get<double>(), s["max_sens"]["mean"].get<double>(),
                    s["max_sens"]["ci95"].get<double>());
      text += buf;
    }
  }
  if (report.contains("bias")) {
    text += "\nBias detection rates:\n";
    char buf[160];
    for (const auto& [setting, b] : report["bias"].items()) {
      for (const auto& [strategy, ci] : b["rates"].items()) {
        std::snprintf(buf, sizeof buf, "  %-4s %-18s %5.1f%% +/- %.1f%%\n", setting.c_str(),
                      strategy.c_str(), 100.0 * ci["mean"].get<double>(),
                      100.0 * ci["ci95"].get<double>());
        text += buf;
      }
    }
  }
  detail::write_text_file(run_dir + "/report.json", report.dump(2) + "\n");
  detail::write_text_file(run_dir + "/report.txt", text);
  return report;
}

}  // namespace lenp
