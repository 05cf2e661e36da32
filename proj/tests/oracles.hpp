#pragma once

// Test-only reference computations. These deliberately avoid the library's
// covariance propagation: they expand output quadratures in terms of the
// input vacuum quadratures (Heisenberg picture) with plain loops.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

using Real = long double;
using Complex = std::complex<Real>;
template <std::size_t N>
using CMatrix = std::array<std::array<Complex, N>, N>;

// Quadrature combination sum_i (cx_i x'_i + cp_i p'_i) with a' = U a and
// independent inputs of variances vx (x) and vp (p). Each output quadrature
// is x'_i = sum_j Re U_ij x_j - Im U_ij p_j, p'_i = sum_j Im U_ij x_j + Re U_ij p_j.
template <std::size_t N>
Real heisenberg_variance(const CMatrix<N>& u, const std::array<Real, N>& vx, const std::array<Real, N>& vp,
                         const std::array<Real, N>& cx, const std::array<Real, N>& cp) {
  Real total = 0;
  for (std::size_t j = 0; j < N; ++j) {
    Real coeff_x = 0;
    Real coeff_p = 0;
    for (std::size_t i = 0; i < N; ++i) {
      coeff_x += cx[i] * u[i][j].real() + cp[i] * u[i][j].imag();
      coeff_p += -cx[i] * u[i][j].imag() + cp[i] * u[i][j].real();
    }
    total += coeff_x * coeff_x * vx[j] + coeff_p * coeff_p * vp[j];
  }
  return total;
}

// Plain 4x4 complex product, used to multiply factor strings by hand.
template <std::size_t N>
CMatrix<N> multiply(const CMatrix<N>& a, const CMatrix<N>& b) {
  CMatrix<N> out{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t k = 0; k < N; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

template <std::size_t N>
CMatrix<N> identity() {
  CMatrix<N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i][i] = 1;
  return out;
}

// Monte-Carlo average of a single-mode rotation by theta ~ N(0, sigma^2)
// applied to a diagonal covariance diag(a, d) with zero mean.
struct JitterMoments {
  double xx;
  double pp;
  double xp;
};

inline JitterMoments sampled_jitter(double a, double d, double sigma, std::size_t samples, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> angle(0.0, sigma);
  double xx = 0, pp = 0, xp = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = angle(rng);
    const double c = std::cos(t);
    const double s = std::sin(t);
    xx += c * c * a + s * s * d;
    pp += s * s * a + c * c * d;
    xp += c * s * (a - d);
  }
  const double n = static_cast<double>(samples);
  return {xx / n, pp / n, xp / n};
}

}  // namespace oracle
