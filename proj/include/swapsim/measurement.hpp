#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "swapsim/common.hpp"
#include "swapsim/rng.hpp"
#include "swapsim/state.hpp"

namespace swapsim {

/// Outcome of a projective measurement: which basis element fired, its Born
/// probability, and the normalized post-measurement state of the full
/// register.
struct MeasurementResult {
  std::size_t outcome_index;
  double probability;
  StateVector post_state;
};

/// measure_bell result: the Bell label plus the generic fields.
struct BellMeasurementResult {
  BellOutcome outcome;
  double probability;
  StateVector post_state;
};

/// measure_spin result: eigenvalue +1 or -1 plus the generic fields.
struct SpinMeasurementResult {
  int value;
  double probability;
  StateVector post_state;
};

namespace detail {

/// Register order that brings the measured qubits to the front (in spec
/// order) followed by the remaining qubits ascending.
inline SubsystemSpec front_permutation(int num_qubits, const SubsystemSpec& measured) {
  std::vector<int> order = measured.qubits();
  for (int q = 1; q <= num_qubits; ++q) {
    if (!measured.contains(q)) order.push_back(q);
  }
  return SubsystemSpec(std::move(order));
}

inline void validate_measurement_basis(int measured_qubits, const std::vector<StateVector>& basis) {
  const std::uint64_t dim = std::uint64_t{1} << measured_qubits;
  require(basis.size() == dim,
          "measurement basis: need exactly 2^k elements for a k-qubit subsystem");
  for (const StateVector& b : basis) {
    require(b.num_qubits() == measured_qubits,
            "measurement basis: element register size does not match the measured subsystem");
  }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i; j < basis.size(); ++j) {
      const cdouble g = inner(basis[i], basis[j]);
      const cdouble expected = (i == j) ? cdouble{1.0, 0.0} : cdouble{0.0, 0.0};
      require(std::abs(g - expected) <= kBasisGramTol,
              "measurement basis: elements are not orthonormal");
    }
  }
}

/// Projection coefficients of one basis element: with the measured qubits
/// permuted to the front, c[y] = sum_x conj(b[x]) * amp[x:y]. Then
/// |c|^2 summed over y is the outcome probability and c normalized is the
/// relative state of the unmeasured qubits.
inline std::vector<cdouble> projection_coefficients(const StateVector& front_state,
                                                    int measured_qubits,
                                                    const StateVector& basis_element) {
  const int rest_qubits = front_state.num_qubits() - measured_qubits;
  const std::uint64_t rest_dim = std::uint64_t{1} << rest_qubits;
  const std::uint64_t measured_dim = std::uint64_t{1} << measured_qubits;
  std::vector<cdouble> c(rest_dim, cdouble{0.0, 0.0});
  for (std::uint64_t x = 0; x < measured_dim; ++x) {
    const cdouble bx = std::conj(basis_element.amplitude(x));
    if (bx == cdouble{0.0, 0.0}) continue;
    const std::uint64_t base = x << rest_qubits;
    for (std::uint64_t y = 0; y < rest_dim; ++y) c[y] += bx * front_state.amplitude(base | y);
  }
  return c;
}

inline double norm_squared(const std::vector<cdouble>& v) {
  double sum = 0.0;
  for (const cdouble& e : v) sum += std::norm(e);
  return sum;
}

}  // namespace detail

/// Born-rule outcome distribution for measuring `qubits` of `s` in an
/// orthonormal `basis` of that subsystem. Entry k is the probability of
/// projecting onto basis element k; the entries sum to 1.
inline std::vector<double> born_probabilities(const StateVector& s, const SubsystemSpec& qubits,
                                              const std::vector<StateVector>& basis) {
  qubits.validate_against(s.num_qubits());
  detail::validate_measurement_basis(qubits.size(), basis);
  const StateVector front = permute_qubits(s, detail::front_permutation(s.num_qubits(), qubits));
  std::vector<double> probs;
  probs.reserve(basis.size());
  for (const StateVector& b : basis) {
    probs.push_back(detail::norm_squared(detail::projection_coefficients(front, qubits.size(), b)));
  }
  return probs;
}

/// Conditional ("relative") state of the unmeasured qubits after finding
/// `outcome_basis_element` on `measured`. The result's register is the
/// remaining qubits in ascending original order. Conditioning on an outcome
/// of (numerically) zero probability is an error: that outcome cannot occur.
inline StateVector relative_state(const StateVector& s, const SubsystemSpec& measured,
                                  const StateVector& outcome_basis_element) {
  measured.validate_against(s.num_qubits());
  require(measured.size() < s.num_qubits(),
          "relative_state: at least one qubit must remain unmeasured");
  require(outcome_basis_element.num_qubits() == measured.size(),
          "relative_state: outcome register size does not match the measured subsystem");
  const StateVector front = permute_qubits(s, detail::front_permutation(s.num_qubits(), measured));
  std::vector<cdouble> c =
      detail::projection_coefficients(front, measured.size(), outcome_basis_element);
  const double p = detail::norm_squared(c);
  if (p <= kZeroProbability) {
    throw std::domain_error("relative_state: conditioning on an outcome of zero probability");
  }
  const double inv = 1.0 / std::sqrt(p);
  for (cdouble& e : c) e *= inv;
  return StateVector(s.num_qubits() - measured.size(), std::move(c));
}

/// Projective measurement of `qubits` in `basis`, sampled with `rng`.
/// Advances the stream by exactly one draw. The post-state is the normalized
/// projection of the full register; outcomes of zero probability are never
/// selected.
inline MeasurementResult measure(const StateVector& s, const SubsystemSpec& qubits,
                                 const std::vector<StateVector>& basis, RngStream& rng) {
  qubits.validate_against(s.num_qubits());
  detail::validate_measurement_basis(qubits.size(), basis);
  const SubsystemSpec to_front = detail::front_permutation(s.num_qubits(), qubits);
  const StateVector front = permute_qubits(s, to_front);
  const int m = qubits.size();

  std::vector<std::vector<cdouble>> coeffs;
  std::vector<double> probs;
  coeffs.reserve(basis.size());
  probs.reserve(basis.size());
  for (const StateVector& b : basis) {
    coeffs.push_back(detail::projection_coefficients(front, m, b));
    probs.push_back(detail::norm_squared(coeffs.back()));
  }

  // Inverse-CDF sampling over the outcomes with nonzero probability. If
  // roundoff leaves the draw beyond the accumulated total, the last such
  // outcome absorbs it.
  const double u = rng.next_unit();
  std::size_t chosen = basis.size();
  double acc = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (probs[k] <= kZeroProbability) continue;
    acc += probs[k];
    chosen = k;
    if (u < acc) break;
  }
  require(chosen < basis.size(), "measure: state has no overlap with the basis");

  // Post-state: outcome ket on the measured qubits tensored with the
  // normalized relative state, then permuted back to the original order.
  const int rest = s.num_qubits() - m;
  const std::uint64_t rest_dim = std::uint64_t{1} << rest;
  const double inv = 1.0 / std::sqrt(probs[chosen]);
  std::vector<cdouble> post(front.dim(), cdouble{0.0, 0.0});
  for (std::uint64_t x = 0; x < basis[chosen].dim(); ++x) {
    const cdouble bx = basis[chosen].amplitude(x);
    if (bx == cdouble{0.0, 0.0}) continue;
    for (std::uint64_t y = 0; y < rest_dim; ++y) {
      post[(x << rest) | y] = bx * coeffs[chosen][y] * inv;
    }
  }
  StateVector post_front(s.num_qubits(), std::move(post));
  return MeasurementResult{chosen, probs[chosen],
                           permute_qubits(post_front, inverse_permutation(to_front))};
}

/// Joint measurement of a qubit pair in the Bell basis.
inline BellMeasurementResult measure_bell(const StateVector& s, const SubsystemSpec& pair,
                                          RngStream& rng) {
  require(pair.size() == 2, "measure_bell: exactly two qubits required");
  MeasurementResult r = measure(s, pair, bell_basis(), rng);
  return BellMeasurementResult{kBellOutcomes[r.outcome_index], r.probability,
                               std::move(r.post_state)};
}

/// Orthonormal eigenbasis {v+, v-} of the spin observable n.sigma. The two
/// branch formulas avoid cancellation near the poles.
inline std::vector<StateVector> spin_basis(const Vec3& direction) {
  require(direction.is_unit(), "spin_basis: direction must be a unit vector");
  const double nx = direction.x;
  const double ny = direction.y;
  const double nz = direction.z;
  if (nz >= 0.0) {
    const double denom = std::sqrt(2.0 * (1.0 + nz));
    return {StateVector(1, {cdouble{(1.0 + nz) / denom, 0.0}, cdouble{nx / denom, ny / denom}}),
            StateVector(1, {cdouble{-nx / denom, ny / denom}, cdouble{(1.0 + nz) / denom, 0.0}})};
  }
  const double denom = std::sqrt(2.0 * (1.0 - nz));
  return {StateVector(1, {cdouble{nx / denom, -ny / denom}, cdouble{(1.0 - nz) / denom, 0.0}}),
          StateVector(1, {cdouble{(1.0 - nz) / denom, 0.0}, cdouble{-nx / denom, -ny / denom}})};
}

/// Spin measurement of one qubit along a unit direction; the label is the
/// eigenvalue +1 or -1.
inline SpinMeasurementResult measure_spin(const StateVector& s, int qubit, const Vec3& direction,
                                          RngStream& rng) {
  MeasurementResult r = measure(s, SubsystemSpec{qubit}, spin_basis(direction), rng);
  return SpinMeasurementResult{r.outcome_index == 0 ? +1 : -1, r.probability,
                               std::move(r.post_state)};
}

}  // namespace swapsim
