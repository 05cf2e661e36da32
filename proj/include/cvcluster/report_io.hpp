#pragma once

// Serialization of scenario configs and reports.
//
// JSON is the machine format: one document per run, node and mode numbers
// 1-based, doubles written in shortest round-trip form (at most 17
// significant digits), so parse(emit(x)) == x. Sweeps go to CSV. The text
// format is for people: 3 decimals for variances, 1 for dB, 2 for witness sums.

#include <charconv>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "cvcluster/errors.hpp"
#include "cvcluster/scenario.hpp"

namespace cvcluster {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Config

inline Json config_to_json(const ScenarioConfig& cfg) {
  Json j;
  j["network"] = cfg.network;
  j["graph"] = cfg.graph ? Json(*cfg.graph) : Json(nullptr);
  j["squeezing_db"] = cfg.squeezing_db;
  j["antisqueezing_db"] = cfg.antisqueezing_db ? Json(*cfg.antisqueezing_db) : Json(nullptr);
  j["loss"] = cfg.loss_eta;
  j["loss_placement"] = to_string(cfg.loss_placement);
  j["jitter"] = cfg.jitter_sigma;
  j["witness"] = cfg.witness;
  j["verify_decompositions"] = cfg.verify_decompositions;
  j["format"] = to_string(cfg.format);
  if (cfg.jitter_mc) {
    j["jitter_mc"] = {{"samples", cfg.jitter_mc->samples}, {"seed", cfg.jitter_mc->seed}};
  } else {
    j["jitter_mc"] = nullptr;
  }
  return j;
}

namespace detail {

inline std::vector<double> json_numbers(const Json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a number or a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(indexed(field, i), "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

inline std::string json_string(const Json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string");
  return v.get<std::string>();
}

inline bool json_bool(const Json& v, const std::string& field) {
  if (!v.is_boolean()) throw ConfigError(field, "expected true or false");
  return v.get<bool>();
}

inline std::string format_number(double v) { return format_double(v); }

}  // namespace detail

// Fields missing from the document keep their defaults; unknown fields are
// rejected.
inline ScenarioConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  static const std::set<std::string> known = {"network", "graph",   "squeezing_db",          "antisqueezing_db",
                                              "loss",    "loss_placement", "jitter",          "witness",
                                              "verify_decompositions", "format", "jitter_mc"};
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) throw ConfigError(item.key(), "unknown config field");
  }
  ScenarioConfig cfg;
  if (j.contains("network")) cfg.network = detail::json_string(j["network"], "network");
  if (j.contains("graph") && !j["graph"].is_null()) cfg.graph = detail::json_string(j["graph"], "graph");
  if (j.contains("squeezing_db")) cfg.squeezing_db = detail::json_numbers(j["squeezing_db"], "squeezing_db");
  if (j.contains("antisqueezing_db") && !j["antisqueezing_db"].is_null()) {
    cfg.antisqueezing_db = detail::json_numbers(j["antisqueezing_db"], "antisqueezing_db");
  }
  if (j.contains("loss")) cfg.loss_eta = detail::json_numbers(j["loss"], "loss");
  if (j.contains("loss_placement")) {
    cfg.loss_placement = parse_loss_placement(detail::json_string(j["loss_placement"], "loss_placement"));
  }
  if (j.contains("jitter")) cfg.jitter_sigma = detail::json_numbers(j["jitter"], "jitter");
  if (j.contains("witness")) cfg.witness = detail::json_bool(j["witness"], "witness");
  if (j.contains("verify_decompositions")) {
    cfg.verify_decompositions = detail::json_bool(j["verify_decompositions"], "verify_decompositions");
  }
  if (j.contains("format")) cfg.format = parse_output_format(detail::json_string(j["format"], "format"));
  if (j.contains("jitter_mc") && !j["jitter_mc"].is_null()) {
    const auto& mc = j["jitter_mc"];
    if (!mc.is_object() || !mc.contains("samples") || !mc["samples"].is_number_unsigned()) {
      throw ConfigError("jitter_mc.samples", "expected a positive integer");
    }
    if (!mc.contains("seed") || !mc["seed"].is_number_unsigned()) {
      throw ConfigError("jitter_mc.seed", "expected a nonnegative integer");
    }
    cfg.jitter_mc = JitterMonteCarlo{mc["samples"].get<std::size_t>(), mc["seed"].get<std::uint64_t>()};
  }
  return cfg;
}

inline ScenarioConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Report

inline Json decomposition_to_json(const DecompositionReport& report) {
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"name", e.name},
                       {"max_deviation", e.max_deviation},
                       {"global_phase", e.global_phase},
                       {"max_deviation_after_phase", e.max_deviation_after_phase},
                       {"covariance_deviation",
                        e.covariance_deviation ? Json(*e.covariance_deviation) : Json(nullptr)}});
  }
  return {{"entries", entries}};
}

inline DecompositionReport decomposition_from_json(const Json& j) {
  DecompositionReport report;
  for (const auto& e : j.at("entries")) {
    DecompositionEntry entry{e.at("name").get<std::string>(), e.at("max_deviation").get<double>(),
                             e.at("global_phase").get<double>(),
                             e.at("max_deviation_after_phase").get<double>(), std::nullopt};
    if (!e.at("covariance_deviation").is_null()) entry.covariance_deviation = e["covariance_deviation"].get<double>();
    report.entries.push_back(entry);
  }
  return report;
}

inline Json report_to_json(const ScenarioReport& report) {
  Json j;
  j["config"] = config_to_json(report.config);

  Json inputs = Json::array();
  for (std::size_t i = 0; i < report.inputs.size(); ++i) {
    const auto& in = report.inputs[i];
    inputs.push_back({{"mode", i + 1},
                      {"squeezing_db", in.squeezing_db},
                      {"antisqueezing_db", in.antisqueezing_db},
                      {"pure", in.pure}});
  }
  j["inputs"] = inputs;

  Json entries = Json::array();
  for (const auto& e : report.nullifiers.entries) {
    entries.push_back({{"node", e.node + 1},
                       {"variance", e.variance},
                       {"reference", e.reference},
                       {"level_db", e.level_db},
                       {"analytic_expected", e.analytic_expected ? Json(*e.analytic_expected) : Json(nullptr)}});
  }
  j["nullifiers"] = {{"graph", report.nullifiers.graph}, {"entries", entries}};

  if (report.witness) {
    const auto& w = *report.witness;
    Json ineq = Json::array();
    for (const auto& q : w.inequalities) {
      ineq.push_back({{"id", q.id},
                      {"nodes", {q.nodes.first + 1, q.nodes.second + 1}},
                      {"lhs", q.lhs},
                      {"bound", q.bound},
                      {"satisfied", q.satisfied}});
    }
    j["witness"] = {{"graph", w.graph},
                    {"delegated_from", w.delegated_from ? Json(*w.delegated_from) : Json(nullptr)},
                    {"inequalities", ineq},
                    {"fully_inseparable", w.fully_inseparable}};
  } else {
    j["witness"] = nullptr;
  }
  j["decomposition"] = report.decomposition ? decomposition_to_json(*report.decomposition) : Json(nullptr);
  return j;
}

inline std::string emit_report_json(const ScenarioReport& report) { return report_to_json(report).dump(2) + "\n"; }

inline ScenarioReport report_from_json(const Json& j) {
  ScenarioReport report;
  report.config = config_from_json(j.at("config"));
  for (const auto& in : j.at("inputs")) {
    report.inputs.push_back({in.at("squeezing_db").get<double>(), in.at("antisqueezing_db").get<double>(),
                             in.at("pure").get<bool>()});
  }
  const auto& nul = j.at("nullifiers");
  report.nullifiers.graph = nul.at("graph").get<std::string>();
  for (const auto& e : nul.at("entries")) {
    NullifierEntry<double> entry{e.at("node").get<std::size_t>() - 1, e.at("variance").get<double>(),
                                 e.at("reference").get<double>(), e.at("level_db").get<double>(), std::nullopt};
    if (!e.at("analytic_expected").is_null()) entry.analytic_expected = e["analytic_expected"].get<double>();
    report.nullifiers.entries.push_back(entry);
  }
  if (!j.at("witness").is_null()) {
    const auto& w = j["witness"];
    WitnessReport<double> witness;
    witness.graph = w.at("graph").get<std::string>();
    if (!w.at("delegated_from").is_null()) witness.delegated_from = w["delegated_from"].get<std::string>();
    for (const auto& q : w.at("inequalities")) {
      witness.inequalities.push_back({q.at("id").get<std::size_t>(),
                                      {q.at("nodes")[0].get<std::size_t>() - 1, q.at("nodes")[1].get<std::size_t>() - 1},
                                      q.at("lhs").get<double>(),
                                      q.at("bound").get<double>(),
                                      q.at("satisfied").get<bool>()});
    }
    witness.fully_inseparable = w.at("fully_inseparable").get<bool>();
    report.witness = witness;
  }
  if (!j.at("decomposition").is_null()) report.decomposition = decomposition_from_json(j["decomposition"]);
  return report;
}

// ---------------------------------------------------------------------------
// Human-readable text

inline std::string decomposition_to_text(const DecompositionReport& report) {
  std::string out = "Decomposition check (factor string vs literal matrix)\n";
  for (const auto& e : report.entries) {
    out += fmt::format("  {:<22} max |dU| = {:.3e}  global phase = {:.3e} rad  after phase = {:.3e}", e.name,
                       e.max_deviation, e.global_phase, e.max_deviation_after_phase);
    if (e.covariance_deviation) out += fmt::format("  max |dcov| = {:.3e}", *e.covariance_deviation);
    out += '\n';
  }
  return out;
}

inline std::string report_to_text(const ScenarioReport& report) {
  std::string out;
  out += fmt::format("Network: {}   graph: {}\n", report.config.network, report.nullifiers.graph);
  out += "Inputs:\n";
  for (std::size_t i = 0; i < report.inputs.size(); ++i) {
    out += fmt::format("  mode {}  squeezing {:.1f} dB  antisqueezing {:+.1f} dB\n", i + 1,
                       report.inputs[i].squeezing_db, report.inputs[i].antisqueezing_db);
  }
  out += "Nullifiers:\n";
  out += fmt::format("  {:<6}{:>10}{:>11}{:>10}{:>11}\n", "node", "variance", "reference", "level", "analytic");
  for (const auto& e : report.nullifiers.entries) {
    const std::string analytic = e.analytic_expected ? fmt::format("{:.3f}", *e.analytic_expected) : "-";
    out += fmt::format("  {:<6}{:>10.3f}{:>11.3f}{:>7.1f} dB{:>11}\n", e.node + 1, e.variance, e.reference,
                       e.level_db, analytic);
  }
  if (report.witness) {
    const auto& w = *report.witness;
    out += "Witness";
    if (w.delegated_from) out += fmt::format(" ({} verified via its {} equivalent)", *w.delegated_from, w.graph);
    out += ":\n";
    for (const auto& q : w.inequalities) {
      out += fmt::format("  ({}) nodes {}+{}  lhs = {:.2f} {} {:.0f}\n", q.id, q.nodes.first + 1,
                         q.nodes.second + 1, q.lhs, q.satisfied ? "<" : ">=", q.bound);
    }
    out += fmt::format("Fully inseparable: {}\n", w.fully_inseparable ? "yes" : "no");
  }
  if (report.decomposition) out += decomposition_to_text(*report.decomposition);
  return out;
}

// ---------------------------------------------------------------------------
// Sweep CSV
//
// Columns: index, <axis>, then for each node k: nullifier<k>_variance,
// nullifier<k>_db; then (when a witness was evaluated) witness<m>_lhs for
// each inequality and fully_inseparable (0/1).

inline std::string sweep_to_csv(const SweepResult& sweep) {
  std::ostringstream out;
  out << "index," << to_string(sweep.axis);
  if (!sweep.rows.empty()) {
    const auto& first = sweep.rows.front().report;
    for (const auto& e : first.nullifiers.entries) {
      out << ",nullifier" << e.node + 1 << "_variance,nullifier" << e.node + 1 << "_db";
    }
    if (first.witness) {
      for (const auto& q : first.witness->inequalities) out << ",witness" << q.id << "_lhs";
      out << ",fully_inseparable";
    }
  }
  out << '\n';
  for (const auto& row : sweep.rows) {
    out << row.index << ',' << detail::format_number(row.value);
    for (const auto& e : row.report.nullifiers.entries) {
      out << ',' << detail::format_number(e.variance) << ',' << detail::format_number(e.level_db);
    }
    if (row.report.witness) {
      for (const auto& q : row.report.witness->inequalities) out << ',' << detail::format_number(q.lhs);
      out << ',' << (row.report.witness->fully_inseparable ? 1 : 0);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace cvcluster
