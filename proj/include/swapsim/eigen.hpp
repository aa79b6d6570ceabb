#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "swapsim/common.hpp"
#include "swapsim/operators.hpp"

namespace swapsim {

/// Spectral decomposition of a Hermitian matrix: values[k] is the k-th
/// eigenvalue in ascending order and column k of `vectors` the matching
/// unit eigenvector.
struct EigenSystem {
  std::vector<double> values;
  Operator vectors;
};

namespace detail {

inline double frobenius_norm(const Operator& m) {
  double sum = 0.0;
  for (const cdouble& e : m.entries()) sum += std::norm(e);
  return std::sqrt(sum);
}

inline double off_diagonal_norm(const Operator& m) {
  double sum = 0.0;
  for (std::uint64_t r = 0; r < m.dim(); ++r) {
    for (std::uint64_t c = 0; c < m.dim(); ++c) {
      if (r != c) sum += std::norm(m.entry(r, c));
    }
  }
  return std::sqrt(sum);
}

}  // namespace detail

/// Full eigensystem of a Hermitian matrix via cyclic Jacobi rotations.
///
/// Each sweep zeroes every off-diagonal pair (p,q) in turn with a unitary
/// that is a phase twist (making the pivot entry real) followed by a plane
/// rotation. Intended for the small matrices this library works with
/// (dim <= 16); iteration stops when the off-diagonal norm falls below
/// tol * ||M||_F.
inline EigenSystem hermitian_eigensystem(const Operator& m, double tol = 1e-13) {
  require(m.dim() >= 1 && m.dim() <= 16, "hermitian_eigensystem: dimension must be in [1, 16]");
  require(tol > 0.0, "hermitian_eigensystem: tolerance must be positive");
  require(m.is_hermitian(), "hermitian_eigensystem: matrix is not Hermitian");

  const std::uint64_t n = m.dim();
  Operator a = m;
  Operator v = Operator::identity(n);
  const double scale = detail::frobenius_norm(m);
  const double threshold = tol * std::max(scale, 1e-300);

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  while (detail::off_diagonal_norm(a) > threshold) {
    require(sweep++ < kMaxSweeps, "hermitian_eigensystem: Jacobi iteration failed to converge");
    for (std::uint64_t p = 0; p + 1 < n; ++p) {
      for (std::uint64_t q = p + 1; q < n; ++q) {
        const cdouble apq = a.entry(p, q);
        const double r = std::abs(apq);
        if (r <= threshold / static_cast<double>(n * n)) continue;

        // Phase twist diag(1, e^{-i phi}) turns the pivot entry real...
        const cdouble phase = std::conj(apq) / r;  // e^{-i phi}
        // ...then a real rotation annihilates it (smaller-root choice keeps
        // the rotation angle below pi/4 for stability).
        const double app = a.entry(p, p).real();
        const double aqq = a.entry(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // Combined 2x2 block of U = P.R over coordinates (p, q).
        const cdouble upp{c, 0.0};
        const cdouble upq{s, 0.0};
        const cdouble uqp = -s * phase;
        const cdouble uqq = c * phase;

        // A <- U^dagger A U: first the column update, then the row update.
        for (std::uint64_t k = 0; k < n; ++k) {
          const cdouble akp = a.entry(k, p);
          const cdouble akq = a.entry(k, q);
          a.at(k, p) = akp * upp + akq * uqp;
          a.at(k, q) = akp * upq + akq * uqq;
        }
        for (std::uint64_t k = 0; k < n; ++k) {
          const cdouble apk = a.entry(p, k);
          const cdouble aqk = a.entry(q, k);
          a.at(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
          a.at(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
        }
        // Clamp the annihilated pair and enforce Hermitian symmetry exactly.
        a.at(p, q) = cdouble{0.0, 0.0};
        a.at(q, p) = cdouble{0.0, 0.0};
        a.at(p, p) = cdouble{a.entry(p, p).real(), 0.0};
        a.at(q, q) = cdouble{a.entry(q, q).real(), 0.0};

        // V <- V U accumulates the eigenvector columns.
        for (std::uint64_t k = 0; k < n; ++k) {
          const cdouble vkp = v.entry(k, p);
          const cdouble vkq = v.entry(k, q);
          v.at(k, p) = vkp * upp + vkq * uqp;
          v.at(k, q) = vkp * upq + vkq * uqq;
        }
      }
    }
  }

  std::vector<double> values(n);
  for (std::uint64_t i = 0; i < n; ++i) values[i] = a.entry(i, i).real();

  std::vector<std::uint64_t> order(n);
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  std::sort(order.begin(), order.end(),
            [&values](std::uint64_t lhs, std::uint64_t rhs) { return values[lhs] < values[rhs]; });

  EigenSystem out{std::vector<double>(n), Operator::zero(n)};
  for (std::uint64_t k = 0; k < n; ++k) {
    out.values[k] = values[order[k]];
    for (std::uint64_t row = 0; row < n; ++row) out.vectors.at(row, k) = v.entry(row, order[k]);
  }
  return out;
}

/// Eigenvalues only, ascending.
inline std::vector<double> hermitian_eigenvalues(const Operator& m, double tol = 1e-13) {
  return hermitian_eigensystem(m, tol).values;
}

inline double min_eigenvalue(const Operator& m, double tol = 1e-13) {
  return hermitian_eigenvalues(m, tol).front();
}

}  // namespace swapsim
