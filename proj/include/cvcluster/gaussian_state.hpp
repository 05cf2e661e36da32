#pragma once

// Multimode Gaussian states in the hbar = 1/2 convention (vacuum quadrature
// variance 1/4), passive linear optics, and the loss / phase-jitter channels.
//
// Quadratures are stacked as (x_1..x_n, p_1..p_n). A passive interferometer
// acting on annihilation operators as a' = U a, with U = A + iB, acts on the
// quadrature vector through the real matrix S = [[A, -B], [B, A]].
//
// Everything is templated on the real scalar. The default is `long double`:
// nullifiers of strongly squeezed states are small differences of large
// antisqueezed covariance entries, and double precision loses ~1e-4 dB of
// accuracy at -60 dB.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvcluster/errors.hpp"

namespace cvcluster {

using DefaultReal = long double;

template <typename Real>
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

// Variance of either quadrature of the vacuum.
template <typename Real = DefaultReal>
inline constexpr Real kVacuumVariance = Real(1) / Real(4);

// Tolerance used when validating constructor inputs.
inline constexpr double kValidationTolerance = 1e-8;

namespace detail {

template <typename Derived>
auto max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? decltype(m.cwiseAbs().maxCoeff())(0) : m.cwiseAbs().maxCoeff();
}

inline void check_mode(std::size_t mode, std::size_t n_modes) {
  if (mode >= n_modes) {
    throw InvalidArgument("mode index " + std::to_string(mode) + " out of range for " +
                          std::to_string(n_modes) + " modes");
  }
}

}  // namespace detail

// Canonical form Omega = [[0, I], [-I, 0]] in (x.., p..) ordering.
template <typename Real = DefaultReal>
RealMatrix<Real> symplectic_form(std::size_t n_modes) {
  const auto n = static_cast<Eigen::Index>(n_modes);
  RealMatrix<Real> omega = RealMatrix<Real>::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n).setIdentity();
  omega.bottomLeftCorner(n, n) = -RealMatrix<Real>::Identity(n, n);
  return omega;
}

template <typename Real = DefaultReal>
class GaussianState {
 public:
  GaussianState(RealVector<Real> mean, RealMatrix<Real> cov)
      : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (cov_.rows() == 0 || cov_.rows() % 2 != 0 || cov_.rows() != cov_.cols()) {
      throw InvalidArgument("covariance must be a nonempty square matrix of even size");
    }
    if (mean_.size() != cov_.rows()) {
      throw InvalidArgument("mean length does not match covariance size");
    }
    if (!cov_.allFinite() || !mean_.allFinite()) {
      throw InvalidArgument("state has non-finite entries");
    }
    const Real scale = std::max(Real(1), detail::max_abs(cov_));
    if (detail::max_abs(cov_ - cov_.transpose()) > Real(kValidationTolerance) * scale) {
      throw InvalidArgument("covariance is not symmetric");
    }
    cov_ = (cov_ + cov_.transpose()) / Real(2);
  }

  std::size_t n_modes() const { return static_cast<std::size_t>(cov_.rows() / 2); }
  const RealVector<Real>& mean() const { return mean_; }
  const RealMatrix<Real>& cov() const { return cov_; }

  Eigen::Index x_index(std::size_t mode) const { return static_cast<Eigen::Index>(mode); }
  Eigen::Index p_index(std::size_t mode) const {
    return static_cast<Eigen::Index>(n_modes() + mode);
  }

  // Smallest eigenvalue of the Hermitian matrix cov + (i/4) Omega. The state
  // is physical iff this is >= 0 (up to rounding).
  Real uncertainty_margin() const {
    using Complex = std::complex<Real>;
    const ComplexMatrix<Real> h =
        cov_.template cast<Complex>() +
        Complex(0, kVacuumVariance<Real>) * symplectic_form<Real>(n_modes()).template cast<Complex>();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }

  bool satisfies_uncertainty(Real tolerance = Real(1e-10)) const {
    return uncertainty_margin() >= -tolerance;
  }

  friend bool operator==(const GaussianState& a, const GaussianState& b) {
    return a.mean_ == b.mean_ && a.cov_ == b.cov_;
  }

 private:
  RealVector<Real> mean_;
  RealMatrix<Real> cov_;
};

// Real 2n x 2n matrix preserving Omega.
template <typename Real = DefaultReal>
class SymplecticMap {
 public:
  explicit SymplecticMap(RealMatrix<Real> matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() == 0 || matrix_.rows() % 2 != 0 || matrix_.rows() != matrix_.cols()) {
      throw InvalidArgument("symplectic matrix must be square with even size");
    }
    if (deviation() > Real(kValidationTolerance)) {
      throw InvalidArgument("matrix is not symplectic");
    }
  }

  std::size_t n_modes() const { return static_cast<std::size_t>(matrix_.rows() / 2); }
  const RealMatrix<Real>& matrix() const { return matrix_; }

  // max |S Omega S^T - Omega|
  Real deviation() const {
    const auto omega = symplectic_form<Real>(n_modes());
    return detail::max_abs(matrix_ * omega * matrix_.transpose() - omega);
  }

 private:
  RealMatrix<Real> matrix_;
};

// n x n unitary acting on annihilation operators (passive linear optics).
template <typename Real = DefaultReal>
class ComplexUnitary {
 public:
  explicit ComplexUnitary(ComplexMatrix<Real> matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
      throw InvalidArgument("unitary must be a nonempty square matrix");
    }
    if (deviation() > Real(kValidationTolerance)) {
      throw InvalidArgument("matrix is not unitary (max |UU^dagger - I| = " +
                            std::to_string(static_cast<double>(deviation())) + ")");
    }
  }

  static ComplexUnitary identity(std::size_t n_modes) {
    const auto n = static_cast<Eigen::Index>(n_modes);
    return ComplexUnitary(ComplexMatrix<Real>::Identity(n, n));
  }

  std::size_t n_modes() const { return static_cast<std::size_t>(matrix_.rows()); }
  const ComplexMatrix<Real>& matrix() const { return matrix_; }
  const std::complex<Real>& operator()(Eigen::Index i, Eigen::Index j) const { return matrix_(i, j); }

  // max |U U^dagger - I|
  Real deviation() const {
    const auto n = matrix_.rows();
    return detail::max_abs(matrix_ * matrix_.adjoint() - ComplexMatrix<Real>::Identity(n, n));
  }

  ComplexUnitary adjoint() const { return ComplexUnitary(matrix_.adjoint()); }

  friend ComplexUnitary operator*(const ComplexUnitary& a, const ComplexUnitary& b) {
    if (a.n_modes() != b.n_modes()) throw InvalidArgument("unitary size mismatch");
    return ComplexUnitary(a.matrix_ * b.matrix_);
  }

 private:
  ComplexMatrix<Real> matrix_;
};

// Per-mode input squeezing in dB relative to vacuum. `squeezing_db` is the
// p-quadrature level (<= 0), `antisqueezing_db` the x-quadrature level.
struct SqueezedInputSpec {
  double squeezing_db = 0.0;
  double antisqueezing_db = 0.0;
  bool pure = true;

  static SqueezedInputSpec pure_level(double squeezing_db) {
    return {squeezing_db, -squeezing_db, true};
  }
  static SqueezedInputSpec impure(double squeezing_db, double antisqueezing_db) {
    return {squeezing_db, antisqueezing_db, false};
  }

  void validate() const {
    if (!std::isfinite(squeezing_db) || !std::isfinite(antisqueezing_db)) {
      throw InvalidArgument("squeezing levels must be finite");
    }
    if (squeezing_db > 0.0) throw InvalidArgument("squeezing_db must be <= 0");
    if (antisqueezing_db < 0.0) throw InvalidArgument("antisqueezing_db must be >= 0");
    if (pure && antisqueezing_db != -squeezing_db) {
      throw InvalidArgument("pure input requires antisqueezing_db == -squeezing_db");
    }
    if (antisqueezing_db < -squeezing_db) {
      throw InvalidArgument("antisqueezing below the pure-state bound violates the uncertainty relation");
    }
  }

  friend bool operator==(const SqueezedInputSpec&, const SqueezedInputSpec&) = default;
};

// Squeezing parameter r with exp(-2r) = 10^(db/10).
template <typename Real = DefaultReal>
Real squeezing_parameter_from_db(double squeezing_db) {
  return -Real(squeezing_db) * std::numbers::ln10_v<Real> / Real(20);
}

template <typename Real = DefaultReal>
GaussianState<Real> vacuum(std::size_t n_modes) {
  if (n_modes == 0) throw InvalidArgument("vacuum needs at least one mode");
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  return GaussianState<Real>(RealVector<Real>::Zero(dim),
                             kVacuumVariance<Real> * RealMatrix<Real>::Identity(dim, dim));
}

// Single-mode p-squeezed vacuum, a = e^{r} x0 + i e^{-r} p0.
template <typename Real = DefaultReal>
GaussianState<Real> squeezed_vacuum(Real r) {
  if (!std::isfinite(r)) throw InvalidArgument("squeezing parameter must be finite");
  RealMatrix<Real> cov = RealMatrix<Real>::Zero(2, 2);
  cov(0, 0) = kVacuumVariance<Real> * std::exp(Real(2) * r);
  cov(1, 1) = kVacuumVariance<Real> * std::exp(Real(-2) * r);
  return GaussianState<Real>(RealVector<Real>::Zero(2), std::move(cov));
}

template <typename Real = DefaultReal>
GaussianState<Real> impure_squeezed_vacuum(const SqueezedInputSpec& spec) {
  spec.validate();
  const auto level = [](double db) {
    return kVacuumVariance<Real> * std::pow(Real(10), Real(db) / Real(10));
  };
  RealMatrix<Real> cov = RealMatrix<Real>::Zero(2, 2);
  cov(0, 0) = level(spec.antisqueezing_db);
  cov(1, 1) = level(spec.squeezing_db);
  return GaussianState<Real>(RealVector<Real>::Zero(2), std::move(cov));
}

// Product state; mode order of the parts is preserved.
template <typename Real = DefaultReal>
GaussianState<Real> tensor(const std::vector<GaussianState<Real>>& parts) {
  if (parts.empty()) throw InvalidArgument("tensor of an empty list");
  std::size_t total = 0;
  for (const auto& s : parts) total += s.n_modes();
  const auto n = static_cast<Eigen::Index>(total);
  RealVector<Real> mean = RealVector<Real>::Zero(2 * n);
  RealMatrix<Real> cov = RealMatrix<Real>::Zero(2 * n, 2 * n);
  Eigen::Index offset = 0;
  for (const auto& s : parts) {
    const auto k = static_cast<Eigen::Index>(s.n_modes());
    // the four quadrature-sector blocks of each part land at (offset, offset)
    // inside the corresponding global sector
    for (int a = 0; a < 2; ++a) {
      mean.segment(a * n + offset, k) = s.mean().segment(a * k, k);
      for (int b = 0; b < 2; ++b) {
        cov.block(a * n + offset, b * n + offset, k, k) = s.cov().block(a * k, b * k, k, k);
      }
    }
    offset += k;
  }
  return GaussianState<Real>(std::move(mean), std::move(cov));
}

template <typename Real = DefaultReal>
SymplecticMap<Real> unitary_to_symplectic(const ComplexUnitary<Real>& u) {
  const auto n = static_cast<Eigen::Index>(u.n_modes());
  const RealMatrix<Real> a = u.matrix().real();
  const RealMatrix<Real> b = u.matrix().imag();
  RealMatrix<Real> s(2 * n, 2 * n);
  s << a, -b, b, a;
  return SymplecticMap<Real>(std::move(s));
}

// Overload for raw matrices; rejects anything further than 1e-8 from unitary.
template <typename Real>
SymplecticMap<Real> unitary_to_symplectic(const ComplexMatrix<Real>& u) {
  return unitary_to_symplectic(ComplexUnitary<Real>(u));
}

template <typename Real = DefaultReal>
GaussianState<Real> apply_symplectic(const GaussianState<Real>& state, const SymplecticMap<Real>& s) {
  if (state.n_modes() != s.n_modes()) {
    throw InvalidArgument("mode count mismatch: state has " + std::to_string(state.n_modes()) +
                          ", map has " + std::to_string(s.n_modes()));
  }
  const auto& m = s.matrix();
  RealMatrix<Real> cov = m * state.cov() * m.transpose();
  cov = (cov + cov.transpose()) / Real(2);
  return GaussianState<Real>(m * state.mean(), std::move(cov));
}

template <typename Real = DefaultReal>
GaussianState<Real> apply_unitary(const GaussianState<Real>& state, const ComplexUnitary<Real>& u) {
  if (state.n_modes() != u.n_modes()) {
    throw InvalidArgument("mode count mismatch: state has " + std::to_string(state.n_modes()) +
                          ", unitary has " + std::to_string(u.n_modes()));
  }
  return apply_symplectic(state, unitary_to_symplectic(u));
}

// Pure-loss channel with transmissivity eta on one mode (beam splitter with a
// vacuum ancilla, ancilla traced out).
template <typename Real = DefaultReal>
GaussianState<Real> lossy_channel(const GaussianState<Real>& state, std::size_t mode, Real eta) {
  detail::check_mode(mode, state.n_modes());
  if (!(eta >= Real(0) && eta <= Real(1))) {
    throw InvalidArgument("transmissivity must lie in [0, 1]");
  }
  const Real amp = std::sqrt(eta);
  RealVector<Real> mean = state.mean();
  RealMatrix<Real> cov = state.cov();
  for (const auto idx : {state.x_index(mode), state.p_index(mode)}) {
    mean(idx) *= amp;
    cov.row(idx) *= amp;
    cov.col(idx) *= amp;
    cov(idx, idx) += (Real(1) - eta) * kVacuumVariance<Real>;
  }
  return GaussianState<Real>(std::move(mean), std::move(cov));
}

// Average of a phase-space rotation by theta ~ Normal(0, sigma^2) on one mode.
// The result is the covariance (and mean) of the Gaussian mixture, computed
// from E[cos t] = e^{-s^2/2}, E[cos 2t] = e^{-2 s^2}, E[sin t] = E[sin 2t] = 0.
template <typename Real = DefaultReal>
GaussianState<Real> phase_jitter(const GaussianState<Real>& state, std::size_t mode, Real sigma) {
  detail::check_mode(mode, state.n_modes());
  if (!(sigma >= Real(0)) || !std::isfinite(sigma)) {
    throw InvalidArgument("phase jitter sigma must be finite and >= 0");
  }
  const Real var = sigma * sigma;
  const Real cos1 = std::exp(-var / Real(2));
  const Real cos2 = std::exp(Real(-2) * var);
  const Real cos_sq = (Real(1) + cos2) / Real(2);
  const Real sin_sq = (Real(1) - cos2) / Real(2);

  const auto ix = state.x_index(mode);
  const auto ip = state.p_index(mode);
  const RealVector<Real>& m = state.mean();
  RealMatrix<Real> cov = state.cov();

  // Off-block correlations only see E[R].
  for (Eigen::Index k = 0; k < cov.rows(); ++k) {
    if (k == ix || k == ip) continue;
    cov(ix, k) *= cos1;
    cov(ip, k) *= cos1;
    cov(k, ix) *= cos1;
    cov(k, ip) *= cos1;
  }

  // Second moments of the mode itself, then remove the averaged-mean outer product.
  const Real a = state.cov()(ix, ix) + m(ix) * m(ix);
  const Real d = state.cov()(ip, ip) + m(ip) * m(ip);
  const Real b = state.cov()(ix, ip) + m(ix) * m(ip);
  const Real mx = cos1 * m(ix);
  const Real mp = cos1 * m(ip);
  cov(ix, ix) = cos_sq * a + sin_sq * d - mx * mx;
  cov(ip, ip) = sin_sq * a + cos_sq * d - mp * mp;
  cov(ix, ip) = cos2 * b - mx * mp;
  cov(ip, ix) = cov(ix, ip);

  RealVector<Real> mean = m;
  mean(ix) = mx;
  mean(ip) = mp;
  return GaussianState<Real>(std::move(mean), std::move(cov));
}

// Monte-Carlo version of phase_jitter: averages `samples` rotations drawn from
// a fixed-seed generator. Debug path only; converges to the closed form.
template <typename Real = DefaultReal>
GaussianState<Real> phase_jitter_sampled(const GaussianState<Real>& state, std::size_t mode, Real sigma,
                                         std::size_t samples, std::uint64_t seed) {
  detail::check_mode(mode, state.n_modes());
  if (!(sigma >= Real(0)) || !std::isfinite(sigma)) {
    throw InvalidArgument("phase jitter sigma must be finite and >= 0");
  }
  if (samples == 0) throw InvalidArgument("sample count must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> angle(0.0, static_cast<double>(sigma));

  // R(theta) = P0 + cos(theta) Pc + sin(theta) Ps, so averaging R M R^T only
  // needs the sample moments of (1, cos, sin).
  const auto dim = state.cov().rows();
  const auto ix = state.x_index(mode);
  const auto ip = state.p_index(mode);
  std::array<RealMatrix<Real>, 3> basis;
  basis[0] = RealMatrix<Real>::Identity(dim, dim);
  basis[0](ix, ix) = basis[0](ip, ip) = 0;
  basis[1] = RealMatrix<Real>::Zero(dim, dim);
  basis[1](ix, ix) = basis[1](ip, ip) = 1;
  basis[2] = RealMatrix<Real>::Zero(dim, dim);
  basis[2](ip, ix) = 1;
  basis[2](ix, ip) = -1;

  std::array<Real, 3> first{};
  std::array<std::array<Real, 3>, 3> pair{};
  for (std::size_t i = 0; i < samples; ++i) {
    const Real theta = Real(angle(rng));
    const std::array<Real, 3> a{Real(1), std::cos(theta), std::sin(theta)};
    for (int k = 0; k < 3; ++k) {
      first[k] += a[k];
      for (int l = 0; l < 3; ++l) pair[k][l] += a[k] * a[l];
    }
  }
  const Real inv = Real(1) / Real(samples);
  const RealMatrix<Real> second = state.cov() + state.mean() * state.mean().transpose();
  RealMatrix<Real> avg_second = RealMatrix<Real>::Zero(dim, dim);
  RealVector<Real> mean = RealVector<Real>::Zero(dim);
  for (int k = 0; k < 3; ++k) {
    mean += first[k] * inv * (basis[k] * state.mean());
    for (int l = 0; l < 3; ++l) avg_second += pair[k][l] * inv * (basis[k] * second * basis[l].transpose());
  }
  RealMatrix<Real> cov = avg_second - mean * mean.transpose();
  return GaussianState<Real>(std::move(mean), (cov + cov.transpose()) / Real(2));
}

// Variance of sum_i c_i q_i where q = (x.., p..): c^T cov c.
template <typename Real = DefaultReal>
Real combination_variance(const GaussianState<Real>& state, const RealVector<Real>& coeffs) {
  if (coeffs.size() != state.cov().rows()) {
    throw InvalidArgument("coefficient vector has length " + std::to_string(coeffs.size()) +
                          ", expected " + std::to_string(state.cov().rows()));
  }
  return coeffs.dot(state.cov() * coeffs);
}

// 10 log10(v / v_ref).
template <typename Real = DefaultReal>
Real variance_to_db(Real variance, Real reference) {
  if (!(variance > Real(0)) || !(reference > Real(0))) {
    throw InvalidArgument("variances must be positive for a dB level");
  }
  return Real(10) * std::log10(variance / reference);
}

}  // namespace cvcluster
