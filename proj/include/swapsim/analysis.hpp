#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "swapsim/common.hpp"
#include "swapsim/density.hpp"
#include "swapsim/eigen.hpp"
#include "swapsim/operators.hpp"
#include "swapsim/state.hpp"

namespace swapsim {

/// Measurement settings for a CHSH test: two spin directions per side
/// (a, a' for particle 1; b, b' for particle 4), all unit vectors.
struct ChshSettings {
  Vec3 a;
  Vec3 a_prime;
  Vec3 b;
  Vec3 b_prime;

  static ChshSettings of(Vec3 a, Vec3 a_prime, Vec3 b, Vec3 b_prime) {
    ChshSettings s{a, a_prime, b, b_prime};
    require(s.a.is_unit() && s.a_prime.is_unit() && s.b.is_unit() && s.b_prime.is_unit(),
            "ChshSettings: all four directions must be unit vectors");
    return s;
  }

  /// All four directions in the x-z plane, given as polar angles from the
  /// z axis in degrees.
  static ChshSettings from_polar_degrees(double a_deg, double a_prime_deg, double b_deg,
                                         double b_prime_deg) {
    return of(polar_direction(degrees_to_radians(a_deg)),
              polar_direction(degrees_to_radians(a_prime_deg)),
              polar_direction(degrees_to_radians(b_deg)),
              polar_direction(degrees_to_radians(b_prime_deg)));
  }

  /// Directions of side 1 and side 4 for a 1-based setting pair id:
  /// 1=(a,b), 2=(a,b'), 3=(a',b), 4=(a',b').
  Vec3 direction1(int setting_pair) const {
    require(setting_pair >= 1 && setting_pair <= 4, "ChshSettings: setting pair must be 1..4");
    return setting_pair <= 2 ? a : a_prime;
  }
  Vec3 direction4(int setting_pair) const {
    require(setting_pair >= 1 && setting_pair <= 4, "ChshSettings: setting pair must be 1..4");
    return (setting_pair % 2 == 1) ? b : b_prime;
  }
};

/// Singlet-optimal settings: polar angles a=0, a'=90, b=45, b'=135 degrees in
/// the x-z plane. They maximize |S| for the singlet at the quantum bound 2*sqrt(2).
inline ChshSettings default_chsh_settings() {
  return ChshSettings::from_polar_degrees(0.0, 90.0, 45.0, 135.0);
}

/// Exact two-qubit correlator trace(rho * (n1.sigma (x) n2.sigma)).
inline double correlator_exact(const DensityMatrix& rho, const Vec3& dir1, const Vec3& dir2) {
  require(rho.num_qubits() == 2, "correlator_exact: two-qubit states only");
  const Operator obs = kron(spin_operator(dir1), spin_operator(dir2));
  cdouble tr{0.0, 0.0};
  for (std::uint64_t r = 0; r < 4; ++r) {
    for (std::uint64_t c = 0; c < 4; ++c) tr += rho.entry(r, c) * obs.entry(c, r);
  }
  return tr.real();
}

/// Exact CHSH statistic S = E(a,b) - E(a,b') + E(a',b) + E(a',b').
/// |S| <= 2 for separable states, <= 2*sqrt(2) for any quantum state.
inline double chsh_exact(const DensityMatrix& rho, const ChshSettings& settings) {
  return correlator_exact(rho, settings.a, settings.b) -
         correlator_exact(rho, settings.a, settings.b_prime) +
         correlator_exact(rho, settings.a_prime, settings.b) +
         correlator_exact(rho, settings.a_prime, settings.b_prime);
}

/// One CHSH data point: which setting pair was used (1..4) and the two
/// +-1 outcomes.
struct CorrelationSample {
  int setting_pair;
  int outcome1;
  int outcome4;
};

/// Sampled CHSH estimate: per-pair correlators with counts and standard
/// errors, and the combined S with its propagated standard error.
struct ChshEstimate {
  std::array<double, 4> correlators;
  std::array<std::int64_t, 4> counts;
  std::array<double, 4> std_errors;
  double s_value;
  double s_std_error;
};

/// Estimates the four correlators by bucketed means of outcome products and
/// combines them into S. Every setting pair must appear at least once: an
/// empty bucket means the experiment cannot estimate that correlator at all,
/// which is reported as an error rather than a NaN.
inline ChshEstimate chsh_estimate(const std::vector<CorrelationSample>& records) {
  std::array<std::int64_t, 4> counts{0, 0, 0, 0};
  std::array<double, 4> sums{0.0, 0.0, 0.0, 0.0};
  for (const CorrelationSample& rec : records) {
    require(rec.setting_pair >= 1 && rec.setting_pair <= 4,
            "chsh_estimate: setting pair must be 1..4");
    require(rec.outcome1 == 1 || rec.outcome1 == -1, "chsh_estimate: outcome1 must be +1 or -1");
    require(rec.outcome4 == 1 || rec.outcome4 == -1, "chsh_estimate: outcome4 must be +1 or -1");
    const std::size_t k = static_cast<std::size_t>(rec.setting_pair - 1);
    counts[k] += 1;
    sums[k] += static_cast<double>(rec.outcome1 * rec.outcome4);
  }
  ChshEstimate est{};
  est.counts = counts;
  double s_var = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    require(counts[k] > 0, "chsh_estimate: no records for setting pair " + std::to_string(k + 1));
    const double e = sums[k] / static_cast<double>(counts[k]);
    est.correlators[k] = e;
    const double var = std::max(0.0, 1.0 - e * e) / static_cast<double>(counts[k]);
    est.std_errors[k] = std::sqrt(var);
    s_var += var;
  }
  est.s_value = est.correlators[0] - est.correlators[1] + est.correlators[2] + est.correlators[3];
  est.s_std_error = std::sqrt(s_var);
  return est;
}

/// Peres separability verdict for a two-qubit state.
struct PptResult {
  double min_eigenvalue;
  bool separable;
};

/// Partial-transpose criterion, exact for two qubits: the state is separable
/// iff the partial transpose stays positive semidefinite. The small negative
/// floor keeps exact boundary states from flipping verdict under roundoff.
inline PptResult ppt_check(const DensityMatrix& rho) {
  require(rho.num_qubits() == 2, "ppt_check: two-qubit states only");
  const double min_eig = min_eigenvalue(partial_transpose_second(rho));
  return PptResult{min_eig, min_eig >= kPsdFloor};
}

/// |<s|t>|^2: phase-insensitive overlap of two pure states.
inline double fidelity_pure(const StateVector& s, const StateVector& t) {
  require(s.num_qubits() == t.num_qubits(), "fidelity_pure: register sizes differ");
  return std::norm(inner(s, t));
}

}  // namespace swapsim
