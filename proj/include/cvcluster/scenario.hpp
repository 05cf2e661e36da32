#pragma once

// Scenario pipeline: squeezed inputs -> (loss) -> network -> (loss) -> phase
// jitter -> nullifier table and witness verdict. Reports hold doubles so that
// they serialize losslessly; the simulation itself runs in DefaultReal.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cvcluster/cluster_analysis.hpp"
#include "cvcluster/errors.hpp"
#include "cvcluster/gaussian_state.hpp"
#include "cvcluster/optical_network.hpp"

namespace cvcluster {

enum class LossPlacement { Pre, Post };
enum class OutputFormat { Json, Text };

struct JitterMonteCarlo {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  friend bool operator==(const JitterMonteCarlo&, const JitterMonteCarlo&) = default;
};

// Per-mode vectors hold either one value (applied to every mode) or one value
// per mode.
struct ScenarioConfig {
  std::string network = "linear4";   // linear4 | square4 | tshape4 | netlist path
  std::optional<std::string> graph;  // graph name or "1-2,2-3"; required for netlists
  std::vector<double> squeezing_db{0.0};
  std::optional<std::vector<double>> antisqueezing_db;  // absent: pure inputs
  std::vector<double> loss_eta{1.0};
  std::vector<double> jitter_sigma{0.0};
  LossPlacement loss_placement = LossPlacement::Post;
  OutputFormat format = OutputFormat::Json;
  bool witness = true;
  bool verify_decompositions = false;
  std::optional<JitterMonteCarlo> jitter_mc;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct DecompositionEntry {
  std::string name;
  double max_deviation = 0;
  double global_phase = 0;
  double max_deviation_after_phase = 0;
  std::optional<double> covariance_deviation;  // same squeezed input through both
  friend bool operator==(const DecompositionEntry&, const DecompositionEntry&) = default;
};

struct DecompositionReport {
  std::vector<DecompositionEntry> entries;
  friend bool operator==(const DecompositionReport&, const DecompositionReport&) = default;
};

struct ScenarioReport {
  ScenarioConfig config;
  std::vector<SqueezedInputSpec> inputs;
  NullifierReport<double> nullifiers;
  std::optional<WitnessReport<double>> witness;
  std::optional<DecompositionReport> decomposition;
  friend bool operator==(const ScenarioReport&, const ScenarioReport&) = default;
};

inline std::string to_string(LossPlacement p) { return p == LossPlacement::Pre ? "pre" : "post"; }
inline std::string to_string(OutputFormat f) { return f == OutputFormat::Json ? "json" : "text"; }

inline LossPlacement parse_loss_placement(const std::string& s) {
  if (s == "pre") return LossPlacement::Pre;
  if (s == "post") return LossPlacement::Post;
  throw ConfigError("loss_placement", "expected 'pre' or 'post', got '" + s + "'");
}

inline OutputFormat parse_output_format(const std::string& s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "text") return OutputFormat::Text;
  throw ConfigError("format", "expected 'json' or 'text', got '" + s + "'");
}

inline std::optional<ClusterKind> parse_cluster_kind(const std::string& s) {
  if (s == "linear4") return ClusterKind::Linear;
  if (s == "square4") return ClusterKind::Square;
  if (s == "tshape4") return ClusterKind::TShape;
  return std::nullopt;
}

// "linear4" / "square4" / "tshape4", or a 1-based edge list "1-2,2-3".
inline GraphSpec parse_graph(const std::string& text, std::size_t n_nodes) {
  if (auto kind = parse_cluster_kind(text)) {
    auto g = GraphSpec::named(*kind);
    if (g.n_nodes() != n_nodes) {
      throw ConfigError("graph", text + " needs 4 modes, network has " + std::to_string(n_nodes));
    }
    return g;
  }
  std::vector<GraphSpec::Edge> edges;
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    if (item.empty()) continue;
    std::size_t a = 0;
    std::size_t b = 0;
    char dash = 0;
    std::istringstream edge(item);
    if (!(edge >> a >> dash >> b) || dash != '-' || a == 0 || b == 0 || !(edge >> std::ws).eof()) {
      throw ConfigError("graph", "bad edge '" + item + "' (expected like 1-2)");
    }
    edges.emplace_back(a - 1, b - 1);
  }
  try {
    return GraphSpec::custom(n_nodes, std::move(edges));
  } catch (const InvalidArgument& e) {
    throw ConfigError("graph", e.what());
  }
}

namespace detail {

inline std::vector<double> expand(const std::vector<double>& values, std::size_t n, const std::string& field) {
  if (values.size() == 1) return std::vector<double>(n, values.front());
  if (values.size() != n) {
    throw ConfigError(field, "expected 1 or " + std::to_string(n) + " values, got " +
                                 std::to_string(values.size()));
  }
  return values;
}

inline std::string indexed(const std::string& field, std::size_t i) {
  return field + "[" + std::to_string(i) + "]";
}

inline NetworkProgram load_netlist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("network", "unknown network name or unreadable netlist file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_netlist(buf.str());
  } catch (const InvalidArgument& e) {
    throw ConfigError("network", e.what());
  }
}

}  // namespace detail

// The network's unitary plus the graph used to read its nullifiers.
template <typename Real = DefaultReal>
struct ResolvedNetwork {
  ComplexUnitary<Real> unitary;
  GraphSpec graph;
  std::optional<ClusterKind> kind;  // set only for the literal named networks
};

template <typename Real = DefaultReal>
ResolvedNetwork<Real> resolve_network(const ScenarioConfig& cfg) {
  if (auto kind = parse_cluster_kind(cfg.network)) {
    ComplexUnitary<Real> u = *kind == ClusterKind::Linear   ? linear_cluster_unitary<Real>()
                             : *kind == ClusterKind::Square ? square_cluster_unitary<Real>()
                                                            : tshape_cluster_unitary<Real>();
    GraphSpec g = cfg.graph ? parse_graph(*cfg.graph, 4) : GraphSpec::named(*kind);
    return {std::move(u), std::move(g), kind};
  }
  const auto program = detail::load_netlist_file(cfg.network);
  if (!cfg.graph) throw ConfigError("graph", "a graph is required for netlist networks");
  GraphSpec g = parse_graph(*cfg.graph, program.n_modes);
  return {program_matrix<Real>(program), std::move(g), std::nullopt};
}

// Per-mode input specs after expanding uniform values.
inline std::vector<SqueezedInputSpec> resolve_inputs(const ScenarioConfig& cfg, std::size_t n) {
  const auto s = detail::expand(cfg.squeezing_db, n, "squeezing_db");
  std::optional<std::vector<double>> a;
  if (cfg.antisqueezing_db) a = detail::expand(*cfg.antisqueezing_db, n, "antisqueezing_db");
  std::vector<SqueezedInputSpec> specs;
  for (std::size_t i = 0; i < n; ++i) {
    const auto spec = a ? SqueezedInputSpec::impure(s[i], (*a)[i]) : SqueezedInputSpec::pure_level(s[i]);
    try {
      spec.validate();
    } catch (const InvalidArgument& e) {
      const bool squeezing_bad = !std::isfinite(s[i]) || s[i] > 0.0 || !a;
      throw ConfigError(detail::indexed(squeezing_bad ? "squeezing_db" : "antisqueezing_db", i), e.what());
    }
    specs.push_back(spec);
  }
  return specs;
}

inline void validate_config(const ScenarioConfig& cfg, std::size_t n) {
  resolve_inputs(cfg, n);
  const auto eta = detail::expand(cfg.loss_eta, n, "loss");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eta[i] >= 0.0 && eta[i] <= 1.0)) {
      throw ConfigError(detail::indexed("loss", i), "transmissivity must lie in [0, 1]");
    }
  }
  const auto sigma = detail::expand(cfg.jitter_sigma, n, "jitter");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sigma[i] >= 0.0) || !std::isfinite(sigma[i])) {
      throw ConfigError(detail::indexed("jitter", i), "sigma must be finite and >= 0");
    }
  }
  if (cfg.jitter_mc && cfg.jitter_mc->samples == 0) {
    throw ConfigError("jitter_mc.samples", "must be positive");
  }
}

template <typename Real = DefaultReal>
GaussianState<Real> simulate_output(const ScenarioConfig& cfg, const ResolvedNetwork<Real>& net) {
  const std::size_t n = net.unitary.n_modes();
  validate_config(cfg, n);
  const auto inputs = resolve_inputs(cfg, n);
  const auto eta = detail::expand(cfg.loss_eta, n, "loss");
  const auto sigma = detail::expand(cfg.jitter_sigma, n, "jitter");

  std::vector<GaussianState<Real>> modes;
  for (const auto& spec : inputs) modes.push_back(impure_squeezed_vacuum<Real>(spec));
  auto state = tensor(modes);

  const auto apply_loss = [&](GaussianState<Real> s) {
    for (std::size_t i = 0; i < n; ++i) {
      if (eta[i] != 1.0) s = lossy_channel(s, i, Real(eta[i]));
    }
    return s;
  };
  if (cfg.loss_placement == LossPlacement::Pre) state = apply_loss(std::move(state));
  state = apply_unitary(state, net.unitary);
  if (cfg.loss_placement == LossPlacement::Post) state = apply_loss(std::move(state));
  for (std::size_t i = 0; i < n; ++i) {
    if (sigma[i] == 0.0) continue;
    state = cfg.jitter_mc ? phase_jitter_sampled(state, i, Real(sigma[i]), cfg.jitter_mc->samples,
                                                 cfg.jitter_mc->seed + i)
                          : phase_jitter(state, i, Real(sigma[i]));
  }
  return state;
}

namespace detail {

template <typename Real>
NullifierReport<double> to_double(const NullifierReport<Real>& r) {
  NullifierReport<double> out{r.graph, {}};
  for (const auto& e : r.entries) {
    NullifierEntry<double> d{e.node, static_cast<double>(e.variance), static_cast<double>(e.reference),
                             static_cast<double>(e.level_db), std::nullopt};
    if (e.analytic_expected) d.analytic_expected = static_cast<double>(*e.analytic_expected);
    out.entries.push_back(d);
  }
  return out;
}

template <typename Real>
WitnessReport<double> to_double(const WitnessReport<Real>& r) {
  WitnessReport<double> out{r.graph, r.delegated_from, {}, r.fully_inseparable};
  for (const auto& w : r.inequalities) {
    out.inequalities.push_back({w.id, w.nodes, static_cast<double>(w.lhs), static_cast<double>(w.bound),
                                w.satisfied});
  }
  return out;
}

}  // namespace detail

// Literal-vs-factorized checks for the linear and T-shape networks, plus the
// U_add U_L = U_S relation.
template <typename Real = DefaultReal>
DecompositionReport verify_decompositions() {
  DecompositionReport report;
  std::vector<GaussianState<Real>> inputs;
  for (const double s : {-6.3, -5.5, -5.9, -6.0}) {
    inputs.push_back(impure_squeezed_vacuum<Real>(SqueezedInputSpec::impure(s, 11.9)));
  }
  const auto input = tensor(inputs);
  const auto entry = [&](std::string name, const ComplexUnitary<Real>& literal, const ComplexUnitary<Real>& built) {
    const auto check = compare_unitaries(literal, built);
    const auto a = apply_unitary(input, literal);
    const auto b = apply_unitary(input, built);
    report.entries.push_back({std::move(name), static_cast<double>(check.max_deviation),
                              static_cast<double>(check.global_phase),
                              static_cast<double>(check.max_deviation_after_phase),
                              static_cast<double>(detail::max_abs(a.cov() - b.cov()))});
  };
  entry("linear4", linear_cluster_unitary<Real>(), program_matrix<Real>(linear_program()));
  entry("tshape4", tshape_cluster_unitary<Real>(), program_matrix<Real>(tshape_program()));
  entry("square4 = U_add U_L", square_cluster_unitary<Real>(),
        linear_to_square_unitary<Real>() * linear_cluster_unitary<Real>());
  return report;
}

template <typename Real = DefaultReal>
ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  const auto net = resolve_network<Real>(cfg);
  const std::size_t n = net.unitary.n_modes();
  const auto state = simulate_output(cfg, net);

  ScenarioReport report;
  report.config = cfg;
  report.inputs = resolve_inputs(cfg, n);

  std::optional<std::array<Real, 4>> analytic;
  if (net.kind && net.graph.kind() == net.kind) {
    std::array<Real, 4> r{};
    for (std::size_t i = 0; i < 4; ++i) r[i] = squeezing_parameter_from_db<Real>(report.inputs[i].squeezing_db);
    analytic = analytic_residual_variances<Real>(*net.kind, r);
  }
  report.nullifiers = detail::to_double(nullifier_report(state, net.graph, analytic));
  if (cfg.witness) report.witness = detail::to_double(full_inseparability_verdict(state, net.graph));
  if (cfg.verify_decompositions) report.decomposition = verify_decompositions<Real>();
  return report;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { SqueezingDb, AntisqueezingDb, Eta, Sigma };

inline std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::SqueezingDb: return "squeezing_db";
    case SweepAxis::AntisqueezingDb: return "antisqueezing_db";
    case SweepAxis::Eta: return "eta";
    case SweepAxis::Sigma: return "sigma";
  }
  return "";
}

inline SweepAxis parse_sweep_axis(const std::string& name) {
  for (auto axis : {SweepAxis::SqueezingDb, SweepAxis::AntisqueezingDb, SweepAxis::Eta, SweepAxis::Sigma}) {
    if (name == to_string(axis)) return axis;
  }
  throw ConfigError("axis", "unknown sweep axis '" + name +
                                "' (expected squeezing_db, antisqueezing_db, eta or sigma)");
}

struct SweepSpec {
  SweepAxis axis = SweepAxis::SqueezingDb;
  double from = 0;
  double to = 0;
  std::size_t steps = 0;

  // Evenly spaced grid including both endpoints; one step yields `from`.
  std::vector<double> grid() const {
    if (steps == 0) throw ConfigError("steps", "sweep needs at least one step");
    if (!std::isfinite(from) || !std::isfinite(to)) throw ConfigError("from", "sweep bounds must be finite");
    std::vector<double> out(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      out[i] = steps == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
    }
    if (steps > 1) out.back() = to;
    return out;
  }
};

struct SweepRow {
  std::size_t index = 0;
  double value = 0;
  ScenarioReport report;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::SqueezingDb;
  std::vector<SweepRow> rows;
};

inline ScenarioConfig with_axis_value(ScenarioConfig cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::SqueezingDb: cfg.squeezing_db = {value}; break;
    case SweepAxis::AntisqueezingDb: cfg.antisqueezing_db = std::vector<double>{value}; break;
    case SweepAxis::Eta: cfg.loss_eta = {value}; break;
    case SweepAxis::Sigma: cfg.jitter_sigma = {value}; break;
  }
  return cfg;
}

// Grid points are evaluated on a small worker pool; rows come back in grid
// order regardless of completion order.
template <typename Real = DefaultReal>
SweepResult run_sweep(const ScenarioConfig& cfg, const SweepSpec& sweep) {
  const auto grid = sweep.grid();
  std::vector<std::optional<ScenarioReport>> slots(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        slots[i] = run_scenario<Real>(with_axis_value(cfg, sweep.axis, grid[i]));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers =
      std::min<std::size_t>(grid.size(), std::max(1u, std::thread::hardware_concurrency()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  SweepResult result{sweep.axis, {}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    result.rows.push_back({i, grid[i], std::move(*slots[i])});
  }
  return result;
}

}  // namespace cvcluster
