#pragma once

// Beam-splitter networks for the three four-mode cluster states.
//
// A NetworkProgram is an operator product written left to right; the matrix
// is the ordered product of the element matrices, so the last element acts on
// the input modes first. Mode indices are 0-based in this API and 1-based in
// the netlist text format.

#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <variant>
#include <vector>

#include "cvcluster/errors.hpp"
#include "cvcluster/gaussian_state.hpp"

namespace cvcluster {

enum class Sign { Plus, Minus };

// a_k -> i a_k
struct Fourier {
  std::size_t mode;
  friend bool operator==(const Fourier&, const Fourier&) = default;
};

// a_k -> -i a_k
struct InverseFourier {
  std::size_t mode;
  friend bool operator==(const InverseFourier&, const InverseFourier&) = default;
};

// Identity except (i,i) = t, (i,j) = sqrt(1-t^2), (j,i) = +-sqrt(1-t^2),
// (j,j) = -+t. The 2x2 block has determinant -1 for Plus and +1 for Minus.
struct BeamSplitter {
  std::size_t i;
  std::size_t j;
  double t;
  Sign sign;
  friend bool operator==(const BeamSplitter&, const BeamSplitter&) = default;
};

// Exchanges modes i and j (permutation matrix).
struct Swap {
  std::size_t i;
  std::size_t j;
  friend bool operator==(const Swap&, const Swap&) = default;
};

using NetworkElement = std::variant<Fourier, InverseFourier, BeamSplitter, Swap>;

namespace detail {

inline void check_pair(std::size_t i, std::size_t j, std::size_t n_modes) {
  check_mode(i, n_modes);
  check_mode(j, n_modes);
  if (i == j) throw InvalidArgument("two-mode element needs distinct modes");
}

}  // namespace detail

inline void validate_element(const NetworkElement& element, std::size_t n_modes) {
  std::visit(
      [n_modes](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, Fourier> || std::is_same_v<E, InverseFourier>) {
          detail::check_mode(e.mode, n_modes);
        } else if constexpr (std::is_same_v<E, BeamSplitter>) {
          detail::check_pair(e.i, e.j, n_modes);
          if (!(e.t >= 0.0 && e.t <= 1.0)) {
            throw InvalidArgument("beam splitter transmittance must lie in [0, 1]");
          }
        } else {
          detail::check_pair(e.i, e.j, n_modes);
        }
      },
      element);
}

template <typename Real = DefaultReal>
ComplexUnitary<Real> element_matrix(const NetworkElement& element, std::size_t n_modes) {
  using Complex = std::complex<Real>;
  validate_element(element, n_modes);
  const auto n = static_cast<Eigen::Index>(n_modes);
  ComplexMatrix<Real> m = ComplexMatrix<Real>::Identity(n, n);
  std::visit(
      [&m](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, Fourier>) {
          const auto k = static_cast<Eigen::Index>(e.mode);
          m(k, k) = Complex(0, 1);
        } else if constexpr (std::is_same_v<E, InverseFourier>) {
          const auto k = static_cast<Eigen::Index>(e.mode);
          m(k, k) = Complex(0, -1);
        } else if constexpr (std::is_same_v<E, BeamSplitter>) {
          const auto i = static_cast<Eigen::Index>(e.i);
          const auto j = static_cast<Eigen::Index>(e.j);
          const Real t = Real(e.t);
          const Real r = std::sqrt(Real(1) - t * t);
          const Real s = e.sign == Sign::Plus ? Real(1) : Real(-1);
          m(i, i) = t;
          m(i, j) = r;
          m(j, i) = s * r;
          m(j, j) = -s * t;
        } else {
          const auto i = static_cast<Eigen::Index>(e.i);
          const auto j = static_cast<Eigen::Index>(e.j);
          m(i, i) = 0;
          m(j, j) = 0;
          m(i, j) = 1;
          m(j, i) = 1;
        }
      },
      element);
  return ComplexUnitary<Real>(std::move(m));
}

struct NetworkProgram {
  std::size_t n_modes = 0;
  std::vector<NetworkElement> elements;

  void validate() const {
    if (n_modes == 0) throw InvalidArgument("network needs at least one mode");
    for (const auto& e : elements) validate_element(e, n_modes);
  }

  friend bool operator==(const NetworkProgram&, const NetworkProgram&) = default;
};

template <typename Real = DefaultReal>
ComplexUnitary<Real> program_matrix(const NetworkProgram& program) {
  program.validate();
  const auto n = static_cast<Eigen::Index>(program.n_modes);
  ComplexMatrix<Real> m = ComplexMatrix<Real>::Identity(n, n);
  for (const auto& e : program.elements) {
    m = m * element_matrix<Real>(e, program.n_modes).matrix();
  }
  return ComplexUnitary<Real>(std::move(m));
}

inline std::size_t beam_splitter_count(const NetworkProgram& program) {
  std::size_t count = 0;
  for (const auto& e : program.elements) count += std::holds_alternative<BeamSplitter>(e) ? 1 : 0;
  return count;
}

// ---------------------------------------------------------------------------
// Literal cluster-generating unitaries (4 modes).

template <typename Real = DefaultReal>
ComplexUnitary<Real> linear_cluster_unitary() {
  using C = std::complex<Real>;
  const Real a = Real(1) / std::sqrt(Real(2));
  const Real b = Real(1) / std::sqrt(Real(10));
  const Real c = Real(2) / std::sqrt(Real(10));
  ComplexMatrix<Real> u(4, 4);
  u << C(a, 0), C(b, 0), C(0, c), C(0, 0),
       C(0, a), C(0, -b), C(c, 0), C(0, 0),
       C(0, 0), C(-c, 0), C(0, b), C(0, a),
       C(0, 0), C(0, -c), C(-b, 0), C(a, 0);
  return ComplexUnitary<Real>(std::move(u));
}

template <typename Real = DefaultReal>
ComplexUnitary<Real> square_cluster_unitary() {
  using C = std::complex<Real>;
  const Real a = Real(1) / std::sqrt(Real(2));
  const Real b = Real(1) / std::sqrt(Real(10));
  const Real c = Real(2) / std::sqrt(Real(10));
  ComplexMatrix<Real> u(4, 4);
  u << C(-a, 0), C(-b, 0), C(0, -c), C(0, 0),
       C(a, 0), C(-b, 0), C(0, -c), C(0, 0),
       C(0, 0), C(0, -c), C(-b, 0), C(-a, 0),
       C(0, 0), C(0, -c), C(-b, 0), C(a, 0);
  return ComplexUnitary<Real>(std::move(u));
}

template <typename Real = DefaultReal>
ComplexUnitary<Real> tshape_cluster_unitary() {
  using C = std::complex<Real>;
  const Real a = Real(1) / std::sqrt(Real(2));
  const Real h = Real(1) / Real(2);
  ComplexMatrix<Real> u(4, 4);
  u << C(0, a), C(h, 0), C(0, h), C(0, 0),
       C(a, 0), C(0, h), C(-h, 0), C(0, 0),
       C(0, 0), C(0, h), C(h, 0), C(a, 0),
       C(0, 0), C(0, h), C(h, 0), C(-a, 0);
  return ComplexUnitary<Real>(std::move(u));
}

// Local Fourier transforms taking the linear cluster to the square cluster:
// U_S = diag(-1, -i, i, 1) U_L.
template <typename Real = DefaultReal>
ComplexUnitary<Real> linear_to_square_unitary() {
  using C = std::complex<Real>;
  ComplexMatrix<Real> u = ComplexMatrix<Real>::Zero(4, 4);
  u(0, 0) = C(-1, 0);
  u(1, 1) = C(0, -1);
  u(2, 2) = C(0, 1);
  u(3, 3) = C(1, 0);
  return ComplexUnitary<Real>(std::move(u));
}

// F4 S12 F1^dag B34+(1/sqrt2) B21+(1/sqrt2) B23-(1/sqrt5) F3 F4
inline NetworkProgram linear_program() {
  const double half = 1.0 / std::sqrt(2.0);
  const double fifth = 1.0 / std::sqrt(5.0);
  return {4,
          {Fourier{3}, Swap{0, 1}, InverseFourier{0}, BeamSplitter{2, 3, half, Sign::Plus},
           BeamSplitter{1, 0, half, Sign::Plus}, BeamSplitter{1, 2, fifth, Sign::Minus}, Fourier{2},
           Fourier{3}}};
}

// F1^dag B34+(1/sqrt2) B21+(1/sqrt2) B32-(1/sqrt2) F2
inline NetworkProgram tshape_program() {
  const double half = 1.0 / std::sqrt(2.0);
  return {4,
          {InverseFourier{0}, BeamSplitter{2, 3, half, Sign::Plus}, BeamSplitter{1, 0, half, Sign::Plus},
           BeamSplitter{2, 1, half, Sign::Minus}, Fourier{1}}};
}

// ---------------------------------------------------------------------------
// Netlist text format, one element per line (1-based modes):
//
//   MODES 4
//   F 4
//   Finv 1
//   BS+ 3 4 0.70710678118654757
//   BS- 2 3 0.44721359549995793
//   SWAP 1 2
//
// Blank lines and '#' comments are ignored. Without a MODES line the mode
// count is the largest index used. Transmittances are written with 17
// significant digits, so emit/parse round-trips bit-exactly.

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string netlist_error(std::size_t line, const std::string& what) {
  return "netlist line " + std::to_string(line) + ": " + what;
}

inline std::size_t parse_mode(const std::string& tok, std::size_t line) {
  std::size_t value = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || value == 0) {
    throw InvalidArgument(netlist_error(line, "bad mode index '" + tok + "'"));
  }
  return value - 1;
}

inline double parse_double(const std::string& tok, std::size_t line) {
  double value = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw InvalidArgument(netlist_error(line, "bad number '" + tok + "'"));
  }
  return value;
}

}  // namespace detail

inline std::string emit_netlist(const NetworkProgram& program) {
  std::ostringstream out;
  out << "MODES " << program.n_modes << '\n';
  for (const auto& element : program.elements) {
    std::visit(
        [&out](const auto& e) {
          using E = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<E, Fourier>) {
            out << "F " << e.mode + 1;
          } else if constexpr (std::is_same_v<E, InverseFourier>) {
            out << "Finv " << e.mode + 1;
          } else if constexpr (std::is_same_v<E, BeamSplitter>) {
            out << (e.sign == Sign::Plus ? "BS+ " : "BS- ") << e.i + 1 << ' ' << e.j + 1 << ' '
                << detail::format_double(e.t);
          } else {
            out << "SWAP " << e.i + 1 << ' ' << e.j + 1;
          }
        },
        element);
    out << '\n';
  }
  return out.str();
}

inline NetworkProgram parse_netlist(std::string_view text) {
  NetworkProgram program;
  std::size_t declared_modes = 0;
  std::size_t max_mode = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    std::vector<std::string> tokens;
    for (std::string tok; line >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;

    const std::string& op = tokens[0];
    const auto expect = [&](std::size_t count) {
      if (tokens.size() != count) {
        throw InvalidArgument(detail::netlist_error(
            line_no, "'" + op + "' takes " + std::to_string(count - 1) + " argument(s)"));
      }
    };
    const auto mode_at = [&](std::size_t k) {
      const std::size_t m = detail::parse_mode(tokens[k], line_no);
      max_mode = std::max(max_mode, m + 1);
      return m;
    };

    if (op == "MODES") {
      expect(2);
      if (declared_modes != 0 || !program.elements.empty()) {
        throw InvalidArgument(detail::netlist_error(line_no, "MODES must appear once, before any element"));
      }
      declared_modes = detail::parse_mode(tokens[1], line_no) + 1;
    } else if (op == "F") {
      expect(2);
      program.elements.emplace_back(Fourier{mode_at(1)});
    } else if (op == "Finv") {
      expect(2);
      program.elements.emplace_back(InverseFourier{mode_at(1)});
    } else if (op == "BS+" || op == "BS-") {
      expect(4);
      const auto i = mode_at(1);
      const auto j = mode_at(2);
      program.elements.emplace_back(BeamSplitter{i, j, detail::parse_double(tokens[3], line_no),
                                                 op == "BS+" ? Sign::Plus : Sign::Minus});
    } else if (op == "SWAP") {
      expect(3);
      const auto i = mode_at(1);
      const auto j = mode_at(2);
      program.elements.emplace_back(Swap{i, j});
    } else {
      throw InvalidArgument(detail::netlist_error(line_no, "unknown element '" + op + "'"));
    }
  }
  program.n_modes = declared_modes != 0 ? declared_modes : max_mode;
  program.validate();
  return program;
}

// ---------------------------------------------------------------------------

// Deviation between a literal unitary and a factorized program, before and
// after removing the best-fit global phase.
template <typename Real = DefaultReal>
struct DecompositionCheck {
  Real max_deviation = 0;
  Real global_phase = 0;  // radians; program ~ e^{i phase} literal
  Real max_deviation_after_phase = 0;
};

template <typename Real = DefaultReal>
DecompositionCheck<Real> compare_unitaries(const ComplexUnitary<Real>& literal,
                                           const ComplexUnitary<Real>& built) {
  if (literal.n_modes() != built.n_modes()) throw InvalidArgument("unitary size mismatch");
  DecompositionCheck<Real> check;
  check.max_deviation = detail::max_abs(built.matrix() - literal.matrix());
  const std::complex<Real> overlap = (literal.matrix().adjoint() * built.matrix()).trace();
  check.global_phase = std::abs(overlap) > Real(0) ? std::arg(overlap) : Real(0);
  const std::complex<Real> phase = std::polar(Real(1), check.global_phase);
  check.max_deviation_after_phase = detail::max_abs(built.matrix() - phase * literal.matrix());
  return check;
}

}  // namespace cvcluster
