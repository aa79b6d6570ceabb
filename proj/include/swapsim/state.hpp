#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swapsim/common.hpp"

namespace swapsim {

/// Ordered list of distinct 1-based qubit labels. Identifies the particles a
/// measurement or trace acts on; qubit 1 is the most significant bit of a
/// basis-state index, so the ket |0101> of a four-qubit register sits at
/// amplitude index 5.
class SubsystemSpec {
 public:
  SubsystemSpec(std::initializer_list<int> qubits) : SubsystemSpec(std::vector<int>(qubits)) {}

  explicit SubsystemSpec(std::vector<int> qubits) : qubits_(std::move(qubits)) {
    require(!qubits_.empty(), "SubsystemSpec: at least one qubit label required");
    for (std::size_t i = 0; i < qubits_.size(); ++i) {
      require(qubits_[i] >= 1, "SubsystemSpec: qubit labels are 1-based");
      for (std::size_t j = i + 1; j < qubits_.size(); ++j) {
        require(qubits_[i] != qubits_[j], "SubsystemSpec: qubit labels must be distinct");
      }
    }
  }

  int size() const { return static_cast<int>(qubits_.size()); }
  int qubit(int position) const { return qubits_.at(static_cast<std::size_t>(position)); }
  const std::vector<int>& qubits() const { return qubits_; }

  bool contains(int qubit_label) const {
    for (int q : qubits_) {
      if (q == qubit_label) return true;
    }
    return false;
  }

  /// All labels must fit a register of `num_qubits` qubits.
  void validate_against(int num_qubits) const {
    for (int q : qubits_) {
      require(q <= num_qubits, "SubsystemSpec: qubit label " + std::to_string(q) +
                                   " exceeds register size " + std::to_string(num_qubits));
    }
  }

  bool is_permutation_of(int num_qubits) const {
    if (size() != num_qubits) return false;
    for (int q : qubits_) {
      if (q < 1 || q > num_qubits) return false;
    }
    return true;  // distinctness holds by construction
  }

  bool operator==(const SubsystemSpec& other) const = default;

 private:
  std::vector<int> qubits_;
};

/// Normalized pure state of an ordered qubit register.
///
/// Amplitudes are stored densely: index i holds the coefficient of the basis
/// ket whose bitstring is i written MSB-first, qubit 1 first. States are
/// immutable values; every operation returns a new state.
class StateVector {
 public:
  StateVector(int num_qubits, std::vector<cdouble> amplitudes)
      : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    require(num_qubits_ >= 1, "StateVector: need at least one qubit");
    require(num_qubits_ <= 20, "StateVector: register too large for dense storage");
    require(amps_.size() == (std::size_t{1} << num_qubits_),
            "StateVector: amplitude count must be 2^num_qubits");
    double sum = 0.0;
    for (const cdouble& a : amps_) {
      require(std::isfinite(a.real()) && std::isfinite(a.imag()),
              "StateVector: amplitudes must be finite");
      sum += std::norm(a);
    }
    require(std::abs(sum - 1.0) <= kAlgebraTol,
            "StateVector: amplitudes must be normalized (sum of squares = 1)");
  }

  /// The basis ket |index> (bit pattern MSB-first).
  static StateVector basis_state(int num_qubits, std::uint64_t index) {
    require(num_qubits >= 1 && num_qubits <= 20, "basis_state: invalid register size");
    std::uint64_t dim = std::uint64_t{1} << num_qubits;
    require(index < dim, "basis_state: index out of range");
    std::vector<cdouble> amps(dim, cdouble{0.0, 0.0});
    amps[index] = cdouble{1.0, 0.0};
    return StateVector(num_qubits, std::move(amps));
  }

  int num_qubits() const { return num_qubits_; }
  std::uint64_t dim() const { return static_cast<std::uint64_t>(amps_.size()); }
  const std::vector<cdouble>& amplitudes() const { return amps_; }
  cdouble amplitude(std::uint64_t index) const { return amps_.at(index); }

  double norm_squared() const {
    double sum = 0.0;
    for (const cdouble& a : amps_) sum += std::norm(a);
    return sum;
  }

  /// Exact (bitwise value) comparison; used by reproducibility checks.
  /// Physical comparisons should use fidelity, which ignores global phase.
  bool operator==(const StateVector& other) const = default;

 private:
  int num_qubits_;
  std::vector<cdouble> amps_;
};

/// <a|b>.
inline cdouble inner(const StateVector& a, const StateVector& b) {
  require(a.num_qubits() == b.num_qubits(), "inner: register sizes differ");
  cdouble sum{0.0, 0.0};
  for (std::uint64_t i = 0; i < a.dim(); ++i) {
    sum += std::conj(a.amplitude(i)) * b.amplitude(i);
  }
  return sum;
}

/// Composite state a (x) b; a's qubits come first (most significant).
inline StateVector tensor(const StateVector& a, const StateVector& b) {
  const std::uint64_t dim_b = b.dim();
  std::vector<cdouble> out(a.dim() * dim_b);
  for (std::uint64_t ia = 0; ia < a.dim(); ++ia) {
    for (std::uint64_t ib = 0; ib < dim_b; ++ib) {
      out[(ia << b.num_qubits()) | ib] = a.amplitude(ia) * b.amplitude(ib);
    }
  }
  return StateVector(a.num_qubits() + b.num_qubits(), std::move(out));
}

/// Reorders the register so that qubit perm[k] of `s` occupies position k of
/// the result. perm must be a permutation of 1..num_qubits.
inline StateVector permute_qubits(const StateVector& s, const SubsystemSpec& perm) {
  const int n = s.num_qubits();
  require(perm.is_permutation_of(n), "permute_qubits: not a permutation of the register");
  std::vector<int> src_shift(static_cast<std::size_t>(n));
  std::vector<int> dst_shift(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    src_shift[static_cast<std::size_t>(k)] = n - perm.qubit(k);
    dst_shift[static_cast<std::size_t>(k)] = n - 1 - k;
  }
  std::vector<cdouble> out(s.dim());
  for (std::uint64_t i = 0; i < s.dim(); ++i) {
    std::uint64_t j = 0;
    for (int k = 0; k < n; ++k) {
      j |= ((i >> src_shift[static_cast<std::size_t>(k)]) & 1ULL)
           << dst_shift[static_cast<std::size_t>(k)];
    }
    out[j] = s.amplitude(i);
  }
  return StateVector(n, std::move(out));
}

/// Permutation that undoes `perm` under permute_qubits.
inline SubsystemSpec inverse_permutation(const SubsystemSpec& perm) {
  std::vector<int> inv(static_cast<std::size_t>(perm.size()));
  for (int k = 0; k < perm.size(); ++k) {
    inv[static_cast<std::size_t>(perm.qubit(k) - 1)] = k + 1;
  }
  return SubsystemSpec(std::move(inv));
}

/// Labels of the four maximally entangled two-qubit states.
enum class BellOutcome { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

inline constexpr std::array<BellOutcome, 4> kBellOutcomes{
    BellOutcome::PsiPlus, BellOutcome::PsiMinus, BellOutcome::PhiPlus, BellOutcome::PhiMinus};

inline std::string to_string(BellOutcome label) {
  switch (label) {
    case BellOutcome::PsiPlus: return "psi+";
    case BellOutcome::PsiMinus: return "psi-";
    case BellOutcome::PhiPlus: return "phi+";
    case BellOutcome::PhiMinus: return "phi-";
  }
  throw std::logic_error("to_string: invalid BellOutcome");
}

inline std::optional<BellOutcome> bell_outcome_from_string(std::string_view text) {
  if (text == "psi+") return BellOutcome::PsiPlus;
  if (text == "psi-") return BellOutcome::PsiMinus;
  if (text == "phi+") return BellOutcome::PhiPlus;
  if (text == "phi-") return BellOutcome::PhiMinus;
  return std::nullopt;
}

/// (|01> - |10>)/sqrt(2): anticorrelated along every common axis.
inline StateVector singlet() {
  const double r = 1.0 / std::sqrt(2.0);
  return StateVector(2, {cdouble{0.0, 0.0}, cdouble{r, 0.0}, cdouble{-r, 0.0}, cdouble{0.0, 0.0}});
}

/// The Bell state for a label: psi+- = (|01> +- |10>)/sqrt(2),
/// phi+- = (|00> +- |11>)/sqrt(2). The four are pairwise orthogonal.
inline StateVector bell_state(BellOutcome label) {
  const double r = 1.0 / std::sqrt(2.0);
  const cdouble zero{0.0, 0.0};
  switch (label) {
    case BellOutcome::PsiPlus:
      return StateVector(2, {zero, cdouble{r, 0.0}, cdouble{r, 0.0}, zero});
    case BellOutcome::PsiMinus:
      return singlet();
    case BellOutcome::PhiPlus:
      return StateVector(2, {cdouble{r, 0.0}, zero, zero, cdouble{r, 0.0}});
    case BellOutcome::PhiMinus:
      return StateVector(2, {cdouble{r, 0.0}, zero, zero, cdouble{-r, 0.0}});
  }
  throw std::logic_error("bell_state: invalid BellOutcome");
}

/// The four Bell states in the order of kBellOutcomes.
inline std::vector<StateVector> bell_basis() {
  std::vector<StateVector> basis;
  basis.reserve(4);
  for (BellOutcome label : kBellOutcomes) basis.push_back(bell_state(label));
  return basis;
}

/// The full computational basis |0..0>, ..., |1..1> of a register.
inline std::vector<StateVector> computational_basis(int num_qubits) {
  std::uint64_t dim = std::uint64_t{1} << num_qubits;
  std::vector<StateVector> basis;
  basis.reserve(dim);
  for (std::uint64_t i = 0; i < dim; ++i) basis.push_back(StateVector::basis_state(num_qubits, i));
  return basis;
}

/// Two independent singlet pairs as one register: pair (1,2) from one source,
/// pair (3,4) from the other. Amplitudes are +1/2, -1/2, -1/2, +1/2 at
/// |0101>, |0110>, |1001>, |1010> and zero elsewhere.
inline StateVector joint_state() {
  static const StateVector state = tensor(singlet(), singlet());
  return state;
}

}  // namespace swapsim
