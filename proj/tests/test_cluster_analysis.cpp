#include <array>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cvcluster/cluster_analysis.hpp"
#include "oracles.hpp"

using namespace cvcluster;
using Real = DefaultReal;

namespace {

constexpr std::array kKinds = {ClusterKind::Linear, ClusterKind::Square, ClusterKind::TShape};

ComplexUnitary<Real> network(ClusterKind kind) {
  switch (kind) {
    case ClusterKind::Linear: return linear_cluster_unitary();
    case ClusterKind::Square: return square_cluster_unitary();
    case ClusterKind::TShape: return tshape_cluster_unitary();
  }
  throw std::logic_error("kind");
}

GaussianState<Real> inputs_from_r(const std::array<Real, 4>& r) {
  return tensor<Real>({squeezed_vacuum(r[0]), squeezed_vacuum(r[1]), squeezed_vacuum(r[2]), squeezed_vacuum(r[3])});
}

GaussianState<Real> inputs_from_db(const std::array<double, 4>& s, const std::array<double, 4>& a) {
  std::vector<GaussianState<Real>> parts;
  for (int i = 0; i < 4; ++i) parts.push_back(impure_squeezed_vacuum<Real>(SqueezedInputSpec::impure(s[i], a[i])));
  return tensor(parts);
}

GaussianState<Real> cluster(ClusterKind kind, const std::array<Real, 4>& r) {
  return apply_unitary(inputs_from_r(r), network(kind));
}

std::array<Real, 4> random_r(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.5);
  return {Real(d(rng)), Real(d(rng)), Real(d(rng)), Real(d(rng))};
}

RealVector<Real> expected_vector(std::initializer_list<std::pair<int, double>> entries) {
  RealVector<Real> v = RealVector<Real>::Zero(8);
  for (auto [k, c] : entries) v(k) = c;
  return v;
}

}  // namespace

TEST(GraphSpec, NamedEdgeSets) {
  using E = GraphSpec::Edge;
  EXPECT_EQ(GraphSpec::linear4().edges(), (std::vector<E>{{0, 1}, {1, 2}, {2, 3}}));
  EXPECT_EQ(GraphSpec::square4().edges(), (std::vector<E>{{0, 2}, {0, 3}, {1, 2}, {1, 3}}));
  EXPECT_EQ(GraphSpec::tshape4().edges(), (std::vector<E>{{0, 1}, {0, 2}, {0, 3}}));
  EXPECT_EQ(GraphSpec::custom(4, {{1, 0}, {0, 1}, {2, 3}}).edges(), (std::vector<E>{{0, 1}, {2, 3}}));
}

TEST(GraphSpec, RejectsInvalidEdges) {
  EXPECT_THROW(GraphSpec::custom(3, {{1, 1}}), InvalidArgument);
  EXPECT_THROW(GraphSpec::custom(3, {{0, 3}}), InvalidArgument);
  EXPECT_THROW(GraphSpec::custom(0, {}), InvalidArgument);
}

TEST(NullifierCoefficients, NamedExamples) {
  // (x1..x4, p1..p4)
  EXPECT_EQ(nullifier_coefficients(GraphSpec::linear4(), 0), expected_vector({{4, 1}, {1, -1}}));
  EXPECT_EQ(nullifier_coefficients(GraphSpec::tshape4(), 0), expected_vector({{4, 1}, {1, -1}, {2, -1}, {3, -1}}));
  EXPECT_EQ(nullifier_coefficients(GraphSpec::square4(), 2), expected_vector({{6, 1}, {0, -1}, {1, -1}}));
  EXPECT_THROW(nullifier_coefficients(GraphSpec::linear4(), 4), InvalidArgument);
}

TEST(NullifierReport, IdealLinearNodeOne) {
  const Real r = 0.6L;
  const auto report = nullifier_report(cluster(ClusterKind::Linear, {r, r, r, r}), GraphSpec::linear4());
  EXPECT_NEAR(static_cast<double>(report.entries[0].variance), static_cast<double>(std::exp(-2 * r) / 2), 1e-16);
}

TEST(NullifierReport, VacuumInputsSitAtReference) {
  const auto report = nullifier_report(cluster(ClusterKind::Linear, {0, 0, 0, 0}), GraphSpec::linear4());
  EXPECT_NEAR(static_cast<double>(report.entries[1].variance), 0.75, 1e-17);
  EXPECT_EQ(report.entries[1].reference, 0.75L);
  for (const auto& e : report.entries) EXPECT_NEAR(static_cast<double>(e.level_db), 0.0, 1e-14);
}

TEST(NullifierReport, SquareLevelsEqualInputLevel) {
  const double s = -7.3;
  const Real r = squeezing_parameter_from_db<Real>(s);
  const auto report = nullifier_report(cluster(ClusterKind::Square, {r, r, r, r}), GraphSpec::square4());
  for (const auto& e : report.entries) EXPECT_NEAR(static_cast<double>(e.level_db), s, 1e-12);
}

TEST(NullifierReport, RejectsDimensionMismatch) {
  EXPECT_THROW(nullifier_report(vacuum(3), GraphSpec::linear4()), InvalidArgument);
}

TEST(AnalyticResiduals, VacuumCoefficientSums) {
  const std::array<Real, 4> zero{};
  const auto lin = analytic_residual_variances(ClusterKind::Linear, zero);
  const auto sq = analytic_residual_variances(ClusterKind::Square, zero);
  const auto tee = analytic_residual_variances(ClusterKind::TShape, zero);
  const std::array<double, 4> lin_expected{0.5, 0.75, 0.75, 0.5};
  // T-shape nodes 3 and 4: (1/2 + 1 + 1/2) / 4 = 1/2, two unit-coefficient terms.
  const std::array<double, 4> tee_expected{1.0, 0.5, 0.5, 0.5};
  for (int a = 0; a < 4; ++a) {
    EXPECT_NEAR(static_cast<double>(lin[a]), lin_expected[a], 1e-17);
    EXPECT_NEAR(static_cast<double>(sq[a]), 0.75, 1e-17);
    EXPECT_NEAR(static_cast<double>(tee[a]), tee_expected[a], 1e-17);
  }
}

TEST(AnalyticResiduals, VacuumSumsEqualGraphReferences) {
  for (auto kind : kKinds) {
    const auto values = analytic_residual_variances(kind, std::array<Real, 4>{});
    const auto report = nullifier_report(vacuum(4), GraphSpec::named(kind));
    for (int a = 0; a < 4; ++a) EXPECT_NEAR(static_cast<double>(values[a]), static_cast<double>(report.entries[a].reference), 1e-17);
  }
}

TEST(AnalyticResiduals, MatchSimulationForRandomSqueezing) {
  std::mt19937_64 rng(1234);
  for (auto kind : kKinds) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto r = random_r(rng);
      const auto analytic = analytic_residual_variances(kind, r);
      const auto report = nullifier_report(cluster(kind, r), GraphSpec::named(kind));
      for (int a = 0; a < 4; ++a) {
        EXPECT_NEAR(static_cast<double>(report.entries[a].variance), static_cast<double>(analytic[a]), 1e-12);
      }
    }
  }
}

TEST(AnalyticResiduals, MatchHeisenbergOracle) {
  // Literal matrices re-transcribed here, propagated without covariances.
  std::mt19937_64 rng(77);
  const auto u = linear_cluster_unitary();
  oracle::CMatrix<4> um{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) um[i][j] = u(i, j);
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = random_r(rng);
    std::array<Real, 4> vx{}, vp{};
    for (int j = 0; j < 4; ++j) {
      vx[j] = std::exp(2 * r[j]) / 4;
      vp[j] = std::exp(-2 * r[j]) / 4;
    }
    // p_L2 - x_L1 - x_L3
    const Real v = oracle::heisenberg_variance<4>(um, vx, vp, {-1, 0, -1, 0}, {0, 1, 0, 0});
    EXPECT_NEAR(static_cast<double>(v), static_cast<double>(analytic_residual_variances(ClusterKind::Linear, r)[1]), 1e-12);
  }
}

TEST(EquivalenceIdentities, HoldOnIdealStates) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto check = equivalence_identities_check(cluster(ClusterKind::Linear, random_r(rng)));
    EXPECT_TRUE(check.holds);
    EXPECT_LT(static_cast<double>(check.max_residual), 1e-12);
  }
}

TEST(EquivalenceIdentities, VacuumGivesReferenceValues) {
  const auto check = equivalence_identities_check(cluster(ClusterKind::Linear, {0, 0, 0, 0}));
  for (int a = 0; a < 4; ++a) {
    EXPECT_NEAR(static_cast<double>(check.square_side[a]), 0.75, 1e-15);
    EXPECT_NEAR(static_cast<double>(check.linear_side[a]), 0.75, 1e-15);
  }
}

TEST(EquivalenceIdentities, HoldUnderLoss) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto state = cluster(ClusterKind::Linear, random_r(rng));
    for (std::size_t m = 0; m < 4; ++m) state = lossy_channel(state, m, Real(0.9));
    EXPECT_TRUE(equivalence_identities_check(state).holds);
  }
}

TEST(EquivalenceIdentities, SquareSideMatchesSquareNetwork) {
  const std::array<Real, 4> r{0.3L, 0.9L, 0.5L, 1.2L};
  const auto check = equivalence_identities_check(cluster(ClusterKind::Linear, r));
  const auto direct = nullifier_report(cluster(ClusterKind::Square, r), GraphSpec::square4());
  for (int a = 0; a < 4; ++a) {
    EXPECT_NEAR(static_cast<double>(check.square_side[a]), static_cast<double>(direct.entries[a].variance), 1e-14);
  }
}

TEST(WitnessEvaluate, ReconstructsLinearValuesFromReportedLevels) {
  const auto v = [](double db, double ref) { return ref * std::pow(10.0, db / 10); };
  const double n1 = v(-5.4, 0.5), n2 = v(-5.8, 0.75), n3 = v(-5.3, 0.75), n4 = v(-5.8, 0.5);
  const auto w = witness_evaluate<double>({{n1, n2}, {n3, n2}, {n3, n4}});
  ASSERT_EQ(w.inequalities.size(), 3u);
  EXPECT_NEAR(w.inequalities[0].lhs, 0.34147167454848393, 1e-15);
  EXPECT_NEAR(w.inequalities[1].lhs, 0.41861079139213253, 1e-15);
  EXPECT_NEAR(w.inequalities[2].lhs, 0.352854091594748, 1e-15);
  EXPECT_NEAR(w.inequalities[0].lhs, 0.34, 0.01);
  EXPECT_NEAR(w.inequalities[1].lhs, 0.42, 0.01);
  EXPECT_NEAR(w.inequalities[2].lhs, 0.35, 0.01);
  EXPECT_TRUE(w.fully_inseparable);
}

TEST(WitnessEvaluate, ReconstructsTShapeValuesFromReportedLevels) {
  const auto v = [](double db, double ref) { return ref * std::pow(10.0, db / 10); };
  const double t1 = v(-6.0, 1.0), t2 = v(-5.2, 0.5), t3 = v(-4.9, 0.5), t4 = v(-5.2, 0.5);
  const auto w = witness_evaluate<double>({{t2, t1}, {t3, t1}, {t4, t1}});
  EXPECT_NEAR(w.inequalities[0].lhs, 0.40218622917105884, 1e-15);
  EXPECT_NEAR(w.inequalities[1].lhs, 0.41298547161577215, 1e-15);
  EXPECT_NEAR(w.inequalities[2].lhs, 0.40218622917105884, 1e-15);
  EXPECT_TRUE(w.fully_inseparable);
}

TEST(WitnessEvaluate, VacuumFails) {
  const auto w = witness_evaluate<double>({{0.5, 0.75}, {0.75, 0.75}, {0.75, 0.5}});
  EXPECT_DOUBLE_EQ(w.inequalities[0].lhs, 1.25);
  EXPECT_DOUBLE_EQ(w.inequalities[1].lhs, 1.5);
  EXPECT_DOUBLE_EQ(w.inequalities[2].lhs, 1.25);
  for (const auto& q : w.inequalities) EXPECT_FALSE(q.satisfied);
  EXPECT_FALSE(w.fully_inseparable);
}

TEST(WitnessEvaluate, BoundIsStrict) {
  EXPECT_FALSE(witness_evaluate<double>({{0.5, 0.5}}).fully_inseparable);
  EXPECT_THROW(witness_evaluate<double>({{0.0, 0.5}}), InvalidArgument);
  EXPECT_THROW(witness_evaluate<double>({{-0.1, 0.5}}), InvalidArgument);
  EXPECT_THROW(witness_evaluate<double>({}), InvalidArgument);
}

TEST(WitnessEvaluate, DecreasingVarianceNeverBreaksVerdict) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> var(0.01, 0.6);
  std::uniform_real_distribution<double> shrink(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::pair<double, double>> pairs;
    for (int k = 0; k < 3; ++k) pairs.emplace_back(var(rng), var(rng));
    const bool before = witness_evaluate<double>(pairs).fully_inseparable;
    auto reduced = pairs;
    reduced[trial % 3].first *= shrink(rng);
    reduced[(trial + 1) % 3].second *= shrink(rng);
    if (before) {
      EXPECT_TRUE(witness_evaluate<double>(reduced).fully_inseparable);
    }
  }
}

TEST(FullInseparability, IdealLinearAtSixDb) {
  const Real r = squeezing_parameter_from_db<Real>(-6.0);
  const auto w = full_inseparability_verdict(cluster(ClusterKind::Linear, {r, r, r, r}), GraphSpec::linear4());
  EXPECT_TRUE(w.fully_inseparable);
  EXPECT_NEAR(static_cast<double>(w.inequalities[0].lhs), 0.3139858039386975, 1e-14);
  EXPECT_NEAR(static_cast<double>(w.inequalities[1].lhs), 0.376782964726437, 1e-14);
  EXPECT_EQ(w.inequalities[0].nodes, (std::pair<std::size_t, std::size_t>{0, 1}));
}

TEST(FullInseparability, VacuumAndLossyVacuumFail) {
  for (auto g : {GraphSpec::linear4(), GraphSpec::tshape4(), GraphSpec::square4()}) {
    EXPECT_FALSE(full_inseparability_verdict(vacuum(4), g).fully_inseparable) << g.name();
    auto state = apply_unitary(vacuum(4), network(*g.kind()));
    for (std::size_t m = 0; m < 4; ++m) state = lossy_channel(state, m, Real(0.3));
    EXPECT_FALSE(full_inseparability_verdict(state, g).fully_inseparable) << g.name();
  }
}

TEST(FullInseparability, SquareDelegatesToLinear) {
  const std::array<Real, 4> r{0.7L, 0.6L, 0.8L, 0.65L};
  const auto sq = full_inseparability_verdict(cluster(ClusterKind::Square, r), GraphSpec::square4());
  const auto lin = full_inseparability_verdict(cluster(ClusterKind::Linear, r), GraphSpec::linear4());
  ASSERT_TRUE(sq.delegated_from.has_value());
  EXPECT_EQ(*sq.delegated_from, "square4");
  EXPECT_EQ(sq.graph, "linear4");
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(static_cast<double>(sq.inequalities[k].lhs), static_cast<double>(lin.inequalities[k].lhs), 1e-14);
  }
  EXPECT_TRUE(sq.fully_inseparable);
}

TEST(FullInseparability, CustomGraphIsUnsupported) {
  const auto g = GraphSpec::custom(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  EXPECT_NO_THROW(nullifier_report(vacuum(4), g));
  EXPECT_THROW(full_inseparability_verdict(vacuum(4), g), UnsupportedGraph);
}

// ---------------------------------------------------------------------------
// Properties

TEST(Properties, AntisqueezingIsEliminated) {
  for (auto kind : kKinds) {
    for (double s : {-3.0, -6.0, -9.5}) {
      const std::array<double, 4> sq{s, s + 0.4, s - 0.3, s + 0.1};
      std::array<Real, 4> reference{};
      for (int level = 0; level < 3; ++level) {
        std::array<double, 4> anti{};
        for (int i = 0; i < 4; ++i) anti[i] = -sq[i] + 6.0 * level;
        const auto report = nullifier_report(apply_unitary(inputs_from_db(sq, anti), network(kind)), GraphSpec::named(kind));
        for (int a = 0; a < 4; ++a) {
          if (level == 0) reference[a] = report.entries[a].variance;
          EXPECT_NEAR(static_cast<double>(report.entries[a].variance), static_cast<double>(reference[a]), 1e-12)
              << to_string(kind) << " node " << a + 1;
        }
      }
    }
  }
}

TEST(Properties, MonotoneInContributingSqueezers) {
  std::mt19937_64 rng(17);
  for (auto kind : kKinds) {
    const auto coeffs = residual_coefficients<Real>(kind);
    for (int trial = 0; trial < 10; ++trial) {
      const auto r = random_r(rng);
      const auto base = nullifier_report(cluster(kind, r), GraphSpec::named(kind));
      for (int j = 0; j < 4; ++j) {
        auto bumped = r;
        bumped[j] += 0.1L;
        const auto next = nullifier_report(cluster(kind, bumped), GraphSpec::named(kind));
        for (int a = 0; a < 4; ++a) {
          if (coeffs[a][j] != 0) {
            EXPECT_LT(next.entries[a].variance, base.entries[a].variance);
          } else {
            EXPECT_NEAR(static_cast<double>(next.entries[a].variance), static_cast<double>(base.entries[a].variance), 1e-14);
          }
        }
      }
    }
  }
}

TEST(Properties, InfiniteSqueezingLimitProxy) {
  for (auto kind : kKinds) {
    const auto state = apply_unitary(inputs_from_db({-60, -60, -60, -60}, {60, 60, 60, 60}), network(kind));
    for (const auto& e : nullifier_report(state, GraphSpec::named(kind)).entries) {
      EXPECT_NEAR(static_cast<double>(e.level_db), -60.0, 1e-6) << to_string(kind);
    }
  }
}
