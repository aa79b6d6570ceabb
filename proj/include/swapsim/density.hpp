#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "swapsim/common.hpp"
#include "swapsim/eigen.hpp"
#include "swapsim/operators.hpp"
#include "swapsim/state.hpp"

namespace swapsim {

/// Mixed state of a qubit register: Hermitian, unit-trace, positive
/// semidefinite matrix. Validation happens on construction, so a
/// DensityMatrix value is always physical.
class DensityMatrix {
 public:
  /// Validates and wraps a matrix. Hermiticity and trace are checked
  /// directly; positivity via the Jacobi eigensolver with a small negative
  /// floor so exact boundary states (pure projectors, maximally mixed)
  /// survive roundoff.
  static DensityMatrix from_operator(const Operator& m) {
    int num_qubits = 0;
    std::uint64_t dim = m.dim();
    require(dim >= 2, "DensityMatrix: dimension must be at least 2");
    while (dim > 1) {
      require(dim % 2 == 0, "DensityMatrix: dimension must be a power of 2");
      dim >>= 1;
      ++num_qubits;
    }
    require(m.is_hermitian(kAlgebraTol), "DensityMatrix: matrix is not Hermitian");
    require(std::abs(m.trace() - cdouble{1.0, 0.0}) <= kAlgebraTol,
            "DensityMatrix: trace must be 1");
    require(min_eigenvalue(m) >= kPsdFloor, "DensityMatrix: matrix is not positive semidefinite");
    return DensityMatrix(num_qubits, m);
  }

  int num_qubits() const { return num_qubits_; }
  std::uint64_t dim() const { return matrix_.dim(); }
  const Operator& matrix() const { return matrix_; }
  cdouble entry(std::uint64_t row, std::uint64_t col) const { return matrix_.entry(row, col); }

  double max_abs_difference(const DensityMatrix& other) const {
    return matrix_.max_abs_difference(other.matrix_);
  }

  bool operator==(const DensityMatrix& other) const = default;

 private:
  DensityMatrix(int num_qubits, Operator matrix)
      : num_qubits_(num_qubits), matrix_(std::move(matrix)) {}

  int num_qubits_;
  Operator matrix_;
};

/// The maximally mixed state I/dim.
inline DensityMatrix maximally_mixed(int num_qubits) {
  require(num_qubits >= 1, "maximally_mixed: need at least one qubit");
  const std::uint64_t dim = std::uint64_t{1} << num_qubits;
  Operator m = (1.0 / static_cast<double>(dim)) * Operator::identity(dim);
  return DensityMatrix::from_operator(m);
}

/// |s><s|.
inline DensityMatrix density_from_pure(const StateVector& s) {
  Operator m = Operator::zero(s.dim());
  for (std::uint64_t r = 0; r < s.dim(); ++r) {
    for (std::uint64_t c = 0; c < s.dim(); ++c) {
      m.at(r, c) = s.amplitude(r) * std::conj(s.amplitude(c));
    }
  }
  return DensityMatrix::from_operator(m);
}

/// Convex mixture sum_k weights[k] * states[k]. Weights must be a
/// probability vector.
inline DensityMatrix mixture(const std::vector<double>& weights,
                             const std::vector<DensityMatrix>& states) {
  require(!states.empty(), "mixture: need at least one state");
  require(weights.size() == states.size(), "mixture: weight/state count mismatch");
  double total = 0.0;
  for (double w : weights) {
    require(w >= -kZeroProbability, "mixture: weights must be nonnegative");
    total += w;
  }
  require(std::abs(total - 1.0) <= kAlgebraTol, "mixture: weights must sum to 1");
  Operator sum = Operator::zero(states.front().dim());
  for (std::size_t k = 0; k < states.size(); ++k) {
    require(states[k].dim() == sum.dim(), "mixture: state dimensions differ");
    sum = sum + weights[k] * states[k].matrix();
  }
  return DensityMatrix::from_operator(sum);
}

/// Reduced state over `keep` (in the order given), tracing out every other
/// qubit of the register.
inline DensityMatrix partial_trace(const DensityMatrix& rho, const SubsystemSpec& keep,
                                   int total_qubits) {
  require(total_qubits == rho.num_qubits(),
          "partial_trace: total_qubits does not match the state");
  keep.validate_against(total_qubits);
  const int n = total_qubits;
  const int k = keep.size();
  require(k < n, "partial_trace: must trace out at least one qubit");

  std::vector<int> traced;  // qubit labels to sum over, ascending
  for (int q = 1; q <= n; ++q) {
    if (!keep.contains(q)) traced.push_back(q);
  }
  const int t = static_cast<int>(traced.size());

  // Bit shifts within the full register index (qubit q holds bit n - q).
  std::vector<int> keep_shift(static_cast<std::size_t>(k));
  for (int m = 0; m < k; ++m) keep_shift[static_cast<std::size_t>(m)] = n - keep.qubit(m);
  std::vector<int> traced_shift(static_cast<std::size_t>(t));
  for (int m = 0; m < t; ++m) traced_shift[static_cast<std::size_t>(m)] = n - traced[static_cast<std::size_t>(m)];

  const std::uint64_t reduced_dim = std::uint64_t{1} << k;
  const std::uint64_t traced_dim = std::uint64_t{1} << t;

  auto embed = [&](std::uint64_t kept_bits, std::uint64_t traced_bits) {
    std::uint64_t full = 0;
    for (int m = 0; m < k; ++m) {
      full |= ((kept_bits >> (k - 1 - m)) & 1ULL) << keep_shift[static_cast<std::size_t>(m)];
    }
    for (int m = 0; m < t; ++m) {
      full |= ((traced_bits >> (t - 1 - m)) & 1ULL) << traced_shift[static_cast<std::size_t>(m)];
    }
    return full;
  };

  Operator reduced = Operator::zero(reduced_dim);
  for (std::uint64_t i = 0; i < reduced_dim; ++i) {
    for (std::uint64_t j = 0; j < reduced_dim; ++j) {
      cdouble sum{0.0, 0.0};
      for (std::uint64_t tr = 0; tr < traced_dim; ++tr) {
        sum += rho.entry(embed(i, tr), embed(j, tr));
      }
      reduced.at(i, j) = sum;
    }
  }
  return DensityMatrix::from_operator(reduced);
}

/// Partial transpose of a two-qubit state over its second qubit. The result
/// is Hermitian but in general not positive, so it is returned as a plain
/// matrix rather than a DensityMatrix.
inline Operator partial_transpose_second(const DensityMatrix& rho) {
  require(rho.num_qubits() == 2, "partial_transpose_second: two-qubit states only");
  Operator out = Operator::zero(4);
  for (std::uint64_t i = 0; i < 2; ++i) {
    for (std::uint64_t j = 0; j < 2; ++j) {
      for (std::uint64_t a = 0; a < 2; ++a) {
        for (std::uint64_t b = 0; b < 2; ++b) {
          out.at(2 * i + a, 2 * j + b) = rho.entry(2 * i + b, 2 * j + a);
        }
      }
    }
  }
  return out;
}

/// Partial transpose over the first qubit; spectra of the two choices agree.
inline Operator partial_transpose_first(const DensityMatrix& rho) {
  require(rho.num_qubits() == 2, "partial_transpose_first: two-qubit states only");
  Operator out = Operator::zero(4);
  for (std::uint64_t i = 0; i < 2; ++i) {
    for (std::uint64_t j = 0; j < 2; ++j) {
      for (std::uint64_t a = 0; a < 2; ++a) {
        for (std::uint64_t b = 0; b < 2; ++b) {
          out.at(2 * i + a, 2 * j + b) = rho.entry(2 * j + a, 2 * i + b);
        }
      }
    }
  }
  return out;
}

}  // namespace swapsim
