#pragma once

// Cluster graphs, nullifier variances, and the full-inseparability witness.
//
// The nullifier of node a is p_a - sum_{b in N(a)} x_b. For an ideal cluster
// its variance vanishes as the input squeezing goes to infinity; its vacuum
// reference is k_a / 4 with k_a = 1 + |N(a)| unit-coefficient terms.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cvcluster/errors.hpp"
#include "cvcluster/gaussian_state.hpp"
#include "cvcluster/optical_network.hpp"

namespace cvcluster {

enum class ClusterKind { Linear, Square, TShape };

inline std::string to_string(ClusterKind kind) {
  switch (kind) {
    case ClusterKind::Linear: return "linear4";
    case ClusterKind::Square: return "square4";
    case ClusterKind::TShape: return "tshape4";
  }
  return "custom";
}

class GraphSpec {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  // Edges are 0-based, unordered, and deduplicated.
  static GraphSpec custom(std::size_t n_nodes, std::vector<Edge> edges) {
    return GraphSpec(n_nodes, std::move(edges), std::nullopt);
  }
  static GraphSpec linear4() { return GraphSpec(4, {{0, 1}, {1, 2}, {2, 3}}, ClusterKind::Linear); }
  static GraphSpec square4() {
    return GraphSpec(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}}, ClusterKind::Square);
  }
  static GraphSpec tshape4() { return GraphSpec(4, {{0, 1}, {0, 2}, {0, 3}}, ClusterKind::TShape); }
  static GraphSpec named(ClusterKind kind) {
    switch (kind) {
      case ClusterKind::Linear: return linear4();
      case ClusterKind::Square: return square4();
      case ClusterKind::TShape: return tshape4();
    }
    throw InvalidArgument("unknown cluster kind");
  }

  std::size_t n_nodes() const { return n_nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::optional<ClusterKind> kind() const { return kind_; }
  std::string name() const { return kind_ ? to_string(*kind_) : "custom"; }

  std::vector<std::size_t> neighbors(std::size_t node) const {
    detail::check_mode(node, n_nodes_);
    std::vector<std::size_t> out;
    for (const auto& [a, b] : edges_) {
      if (a == node) out.push_back(b);
      if (b == node) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const GraphSpec&, const GraphSpec&) = default;

 private:
  GraphSpec(std::size_t n_nodes, std::vector<Edge> edges, std::optional<ClusterKind> kind)
      : n_nodes_(n_nodes), edges_(std::move(edges)), kind_(kind) {
    if (n_nodes_ == 0) throw InvalidArgument("graph needs at least one node");
    for (auto& [a, b] : edges_) {
      detail::check_mode(a, n_nodes_);
      detail::check_mode(b, n_nodes_);
      if (a == b) throw InvalidArgument("graph edges may not be self-loops");
      if (a > b) std::swap(a, b);
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  }

  std::size_t n_nodes_;
  std::vector<Edge> edges_;
  std::optional<ClusterKind> kind_;
};

// +1 at p_a, -1 at x_b for every neighbour b.
template <typename Real = DefaultReal>
RealVector<Real> nullifier_coefficients(const GraphSpec& graph, std::size_t node) {
  const auto n = static_cast<Eigen::Index>(graph.n_nodes());
  RealVector<Real> c = RealVector<Real>::Zero(2 * n);
  for (const auto b : graph.neighbors(node)) c(static_cast<Eigen::Index>(b)) = Real(-1);
  c(n + static_cast<Eigen::Index>(node)) = Real(1);
  return c;
}

template <typename Real = DefaultReal>
struct NullifierEntry {
  std::size_t node = 0;  // 0-based
  Real variance = 0;
  Real reference = 0;  // vacuum-input variance k_a / 4
  Real level_db = 0;
  std::optional<Real> analytic_expected;

  friend bool operator==(const NullifierEntry&, const NullifierEntry&) = default;
};

template <typename Real = DefaultReal>
struct NullifierReport {
  std::string graph;
  std::vector<NullifierEntry<Real>> entries;

  std::vector<Real> variances() const {
    std::vector<Real> out;
    for (const auto& e : entries) out.push_back(e.variance);
    return out;
  }

  friend bool operator==(const NullifierReport&, const NullifierReport&) = default;
};

// `analytic` (optional) carries the closed-form expectation per node.
template <typename Real = DefaultReal>
NullifierReport<Real> nullifier_report(const GaussianState<Real>& state, const GraphSpec& graph,
                                       const std::optional<std::array<Real, 4>>& analytic = std::nullopt) {
  if (state.n_modes() != graph.n_nodes()) {
    throw InvalidArgument("state has " + std::to_string(state.n_modes()) + " modes but graph has " +
                          std::to_string(graph.n_nodes()) + " nodes");
  }
  if (analytic && graph.n_nodes() != 4) throw InvalidArgument("analytic values need a 4-node graph");
  NullifierReport<Real> report{graph.name(), {}};
  for (std::size_t a = 0; a < graph.n_nodes(); ++a) {
    NullifierEntry<Real> entry;
    entry.node = a;
    entry.variance = combination_variance(state, nullifier_coefficients<Real>(graph, a));
    entry.reference = Real(1 + graph.neighbors(a).size()) * kVacuumVariance<Real>;
    entry.level_db = variance_to_db(entry.variance, entry.reference);
    if (analytic) entry.analytic_expected = (*analytic)[a];
    report.entries.push_back(entry);
  }
  return report;
}

// Residual of each nullifier as a combination of the squeezed input
// quadratures: row a holds the coefficients of e^{-r_j} p_j^(0).
template <typename Real = DefaultReal>
std::array<std::array<Real, 4>, 4> residual_coefficients(ClusterKind kind) {
  const Real s2 = std::sqrt(Real(2));
  const Real h = Real(1) / s2;
  const Real f = std::sqrt(Real(5) / Real(2));
  switch (kind) {
    case ClusterKind::Linear:
      return {{{s2, 0, 0, 0}, {0, 0, f, h}, {h, -f, 0, 0}, {0, 0, 0, s2}}};
    case ClusterKind::Square:
      return {{{-h, -f, 0, 0}, {h, -f, 0, 0}, {0, 0, -f, -h}, {0, 0, -f, h}}};
    case ClusterKind::TShape:
      // Nodes 3 and 4 see input 1 through x_T1.
      return {{{0, 2, 0, 0}, {s2, 0, 0, 0}, {h, 0, 1, h}, {h, 0, 1, -h}}};
  }
  throw InvalidArgument("unknown cluster kind");
}

// Closed-form nullifier variances for pure p-squeezed inputs with squeezing
// parameters r through the named network.
template <typename Real = DefaultReal>
std::array<Real, 4> analytic_residual_variances(ClusterKind kind, const std::array<Real, 4>& r) {
  const auto coeffs = residual_coefficients<Real>(kind);
  std::array<Real, 4> out{};
  for (std::size_t a = 0; a < 4; ++a) {
    Real sum = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      sum += coeffs[a][j] * coeffs[a][j] * std::exp(Real(-2) * r[j]);
    }
    out[a] = sum * kVacuumVariance<Real>;
  }
  return out;
}

// Square-cluster nullifiers rewritten in linear-cluster quadratures (valid as
// operator identities because U_S = diag(-1, -i, i, 1) U_L).
template <typename Real = DefaultReal>
struct EquivalenceCheck {
  std::array<Real, 4> square_side{};  // nullifier variances on the square state
  std::array<Real, 4> linear_side{};  // matching combinations on the linear state
  std::array<Real, 4> residuals{};
  Real max_residual = 0;
  bool holds = false;
};

template <typename Real = DefaultReal>
RealVector<Real> quadrature_combination(std::size_t n_modes, std::initializer_list<std::pair<int, int>> terms) {
  // terms: (signed 1-based mode, quadrature 0 = x / 1 = p)
  const auto n = static_cast<Eigen::Index>(n_modes);
  RealVector<Real> c = RealVector<Real>::Zero(2 * n);
  for (const auto& [mode, quad] : terms) {
    const auto k = static_cast<Eigen::Index>(std::abs(mode) - 1);
    c(quad * n + k) += mode > 0 ? Real(1) : Real(-1);
  }
  return c;
}

template <typename Real = DefaultReal>
EquivalenceCheck<Real> equivalence_identities_check(const GaussianState<Real>& linear_state,
                                                     Real tolerance = Real(1e-12)) {
  if (linear_state.n_modes() != 4) throw InvalidArgument("equivalence check needs a 4-mode state");
  constexpr int X = 0;
  constexpr int P = 1;
  const std::array<RealVector<Real>, 4> linear_side = {
      quadrature_combination<Real>(4, {{-1, P}, {+3, P}, {-4, X}}),
      quadrature_combination<Real>(4, {{-2, X}, {+3, P}, {-4, X}}),
      quadrature_combination<Real>(4, {{+1, X}, {-2, P}, {+3, X}}),
      quadrature_combination<Real>(4, {{+1, X}, {-2, P}, {+4, P}}),
  };
  const auto square_state = apply_unitary(linear_state, linear_to_square_unitary<Real>());
  const auto square = GraphSpec::square4();

  EquivalenceCheck<Real> check;
  for (std::size_t a = 0; a < 4; ++a) {
    check.square_side[a] = combination_variance(square_state, nullifier_coefficients<Real>(square, a));
    check.linear_side[a] = combination_variance(linear_state, linear_side[a]);
    check.residuals[a] = std::abs(check.square_side[a] - check.linear_side[a]);
    check.max_residual = std::max(check.max_residual, check.residuals[a]);
  }
  check.holds = check.max_residual < tolerance;
  return check;
}

// ---------------------------------------------------------------------------
// Full-inseparability witness: sums of nullifier-variance pairs, each < 1.

inline constexpr double kWitnessBound = 1.0;

template <typename Real = DefaultReal>
struct WitnessInequality {
  std::size_t id = 0;  // 1-based
  std::pair<std::size_t, std::size_t> nodes{};  // 0-based; empty pair for raw input
  Real lhs = 0;
  Real bound = Real(kWitnessBound);
  bool satisfied = false;

  friend bool operator==(const WitnessInequality&, const WitnessInequality&) = default;
};

template <typename Real = DefaultReal>
struct WitnessReport {
  std::string graph;
  std::optional<std::string> delegated_from;  // set when square4 reuses linear4
  std::vector<WitnessInequality<Real>> inequalities;
  bool fully_inseparable = false;

  friend bool operator==(const WitnessReport&, const WitnessReport&) = default;
};

template <typename Real = DefaultReal>
WitnessReport<Real> witness_evaluate(const std::vector<std::pair<Real, Real>>& variance_pairs) {
  if (variance_pairs.empty()) throw InvalidArgument("witness needs at least one inequality");
  WitnessReport<Real> report;
  report.fully_inseparable = true;
  std::size_t id = 1;
  for (const auto& [a, b] : variance_pairs) {
    if (!(a > Real(0)) || !(b > Real(0))) throw InvalidArgument("witness variances must be positive");
    WitnessInequality<Real> w;
    w.id = id++;
    w.lhs = a + b;
    w.satisfied = w.lhs < w.bound;
    report.fully_inseparable = report.fully_inseparable && w.satisfied;
    report.inequalities.push_back(w);
  }
  return report;
}

// Node pairs entering each inequality. Only linear4 and tshape4 define them;
// square4 is verified through its linear-frame equivalent.
inline std::vector<std::pair<std::size_t, std::size_t>> witness_pairs(const GraphSpec& graph) {
  if (graph.kind() == ClusterKind::Linear) return {{0, 1}, {2, 1}, {2, 3}};
  if (graph.kind() == ClusterKind::TShape) return {{1, 0}, {2, 0}, {3, 0}};
  throw UnsupportedGraph("no full-inseparability witness is defined for graph '" + graph.name() + "'");
}

template <typename Real = DefaultReal>
WitnessReport<Real> full_inseparability_verdict(const GaussianState<Real>& state, const GraphSpec& graph) {
  if (graph.kind() == ClusterKind::Square) {
    if (state.n_modes() != 4) throw InvalidArgument("square4 verdict needs a 4-mode state");
    const auto linear_state = apply_unitary(state, linear_to_square_unitary<Real>().adjoint());
    auto report = full_inseparability_verdict(linear_state, GraphSpec::linear4());
    report.delegated_from = graph.name();
    return report;
  }
  const auto pairs = witness_pairs(graph);
  const auto nullifiers = nullifier_report(state, graph);
  std::vector<std::pair<Real, Real>> values;
  for (const auto& [a, b] : pairs) {
    values.emplace_back(nullifiers.entries[a].variance, nullifiers.entries[b].variance);
  }
  auto report = witness_evaluate(values);
  report.graph = graph.name();
  for (std::size_t k = 0; k < pairs.size(); ++k) report.inequalities[k].nodes = pairs[k];
  return report;
}

}  // namespace cvcluster
