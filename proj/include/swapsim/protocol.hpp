#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swapsim/analysis.hpp"
#include "swapsim/common.hpp"
#include "swapsim/density.hpp"
#include "swapsim/measurement.hpp"
#include "swapsim/rng.hpp"
#include "swapsim/state.hpp"

namespace swapsim {

/// What station D does to qubits (2,3) each trial: a joint Bell-basis
/// measurement, a joint computational (z (x) z) measurement, or nothing.
enum class StationDAction { BellMeasurement, ZZMeasurement, NoMeasurement };

inline std::string to_string(StationDAction action) {
  switch (action) {
    case StationDAction::BellMeasurement: return "bell";
    case StationDAction::ZZMeasurement: return "zz";
    case StationDAction::NoMeasurement: return "none";
  }
  throw std::logic_error("to_string: invalid StationDAction");
}

inline std::optional<StationDAction> station_d_action_from_string(std::string_view text) {
  if (text == "bell") return StationDAction::BellMeasurement;
  if (text == "zz") return StationDAction::ZZMeasurement;
  if (text == "none") return StationDAction::NoMeasurement;
  return std::nullopt;
}

/// What D broadcasts over the classical channel: which trial, what it did,
/// and the outcome label when it measured ("psi+"-style Bell labels or a
/// two-bit string such as "01").
struct ClassicalMessage {
  std::int64_t trial_id;
  StationDAction action;
  std::optional<std::string> outcome;

  bool operator==(const ClassicalMessage& other) const = default;
};

/// Everything logged about one trial. d_outcome is D's local lab record and
/// is present whenever D measured — even when the broadcast channel is off —
/// but selection may only act through delivered messages.
struct TrialRecord {
  std::int64_t trial_id;
  std::uint64_t master_seed;
  StationDAction d_action;
  std::optional<std::string> d_outcome;
  bool message_delivered;
  /// 1..4 = which CHSH direction pair C drew; 0 = settings forced to (z, z)
  /// by the zz scenario.
  int setting_pair;
  int outcome1;
  int outcome4;

  bool operator==(const TrialRecord& other) const = default;
};

/// Full description of an ensemble run. A value that passes validate() can
/// always be executed.
struct ExperimentConfig {
  std::int64_t num_trials = 100000;
  std::uint64_t master_seed = 42;
  StationDAction d_action = StationDAction::BellMeasurement;
  bool broadcast_enabled = true;
  ChshSettings chsh_settings = default_chsh_settings();
  std::optional<BellOutcome> selection_target;
  /// In the zz scenario C's measurement directions are pinned to (z, z), the
  /// axes of that narrative. Distribution comparisons that need C's settings
  /// drawn identically across all D actions switch this off.
  bool zz_forces_z_settings = true;

  void validate() const {
    require(num_trials >= 0, "ExperimentConfig: num_trials must be nonnegative");
    if (selection_target.has_value()) {
      require(d_action == StationDAction::BellMeasurement,
              "ExperimentConfig: selection requires a Bell measurement at station D");
      require(broadcast_enabled,
              "ExperimentConfig: selection requires the classical broadcast to be enabled");
    }
  }
};

/// One protocol round, a pure function of (master_seed, trial_id).
///
/// The two sources emit singlet pairs (1,2) and (3,4); station D applies its
/// action to (2,3) using the trial's D stream; station C then draws a setting
/// pair with its own independent stream and measures the spins of qubits 1
/// and 4. Streams 2k and 2k+1 belong to trial k's D and C respectively, so
/// trials are independent and order-insensitive.
inline TrialRecord run_trial(const ExperimentConfig& config, std::int64_t trial_id) {
  config.validate();
  require(trial_id >= 0, "run_trial: trial_id must be nonnegative");
  RngStream d_rng = rng_derive(config.master_seed, 2 * static_cast<std::uint64_t>(trial_id));
  RngStream c_rng = rng_derive(config.master_seed, 2 * static_cast<std::uint64_t>(trial_id) + 1);

  StateVector state = joint_state();
  const SubsystemSpec d_pair{2, 3};

  std::optional<std::string> d_outcome;
  switch (config.d_action) {
    case StationDAction::BellMeasurement: {
      BellMeasurementResult r = measure_bell(state, d_pair, d_rng);
      d_outcome = to_string(r.outcome);
      state = std::move(r.post_state);
      break;
    }
    case StationDAction::ZZMeasurement: {
      MeasurementResult r = measure(state, d_pair, computational_basis(2), d_rng);
      d_outcome = std::string{r.outcome_index & 2 ? '1' : '0', r.outcome_index & 1 ? '1' : '0'};
      state = std::move(r.post_state);
      break;
    }
    case StationDAction::NoMeasurement:
      break;
  }

  int setting_pair = 0;
  Vec3 dir1{0.0, 0.0, 1.0};
  Vec3 dir4{0.0, 0.0, 1.0};
  const bool forced_zz =
      config.d_action == StationDAction::ZZMeasurement && config.zz_forces_z_settings;
  if (!forced_zz) {
    setting_pair = 1 + static_cast<int>(c_rng.next_index(4));
    dir1 = config.chsh_settings.direction1(setting_pair);
    dir4 = config.chsh_settings.direction4(setting_pair);
  }

  SpinMeasurementResult r1 = measure_spin(state, 1, dir1, c_rng);
  SpinMeasurementResult r4 = measure_spin(r1.post_state, 4, dir4, c_rng);

  return TrialRecord{trial_id,
                     config.master_seed,
                     config.d_action,
                     std::move(d_outcome),
                     config.broadcast_enabled,
                     setting_pair,
                     r1.value,
                     r4.value};
}

/// All trials of a run, in trial-id order. Because each trial owns its
/// streams, the output is independent of execution order.
inline std::vector<TrialRecord> run_ensemble(const ExperimentConfig& config) {
  config.validate();
  std::vector<TrialRecord> records;
  records.reserve(static_cast<std::size_t>(config.num_trials));
  for (std::int64_t k = 0; k < config.num_trials; ++k) records.push_back(run_trial(config, k));
  return records;
}

/// The classical message D sends for a trial, or nothing when the channel is
/// disabled. A delivered message carries an outcome exactly when D measured.
inline std::optional<ClassicalMessage> broadcast(const TrialRecord& record) {
  if (!record.message_delivered) return std::nullopt;
  return ClassicalMessage{record.trial_id, record.d_action, record.d_outcome};
}

/// Sub-ensemble of trials whose delivered message reports the target Bell
/// outcome, in original order. Selection consumes only delivered messages:
/// with the broadcast channel off the operation is impossible — without the
/// classical information there is nothing to select on — and that is an
/// error, not an empty result.
inline std::vector<TrialRecord> post_select(const std::vector<TrialRecord>& records,
                                            BellOutcome target) {
  bool any_delivered = records.empty();
  for (const TrialRecord& rec : records) {
    require(rec.d_action == StationDAction::BellMeasurement,
            "post_select: records must come from a Bell-measurement run");
    if (rec.message_delivered) any_delivered = true;
  }
  if (!any_delivered) {
    throw std::domain_error("post_select: selection without classical information");
  }
  std::vector<TrialRecord> selected;
  for (const TrialRecord& rec : records) {
    const std::optional<ClassicalMessage> msg = broadcast(rec);
    if (!msg.has_value() || !msg->outcome.has_value()) continue;
    const std::optional<BellOutcome> label = bell_outcome_from_string(*msg->outcome);
    require(label.has_value(), "post_select: malformed Bell outcome in record");
    if (*label == target) selected.push_back(rec);
  }
  return selected;
}

/// CorrelationSamples for the CHSH estimator from Bell-mode records (which
/// always carry a drawn setting pair).
inline std::vector<CorrelationSample> correlation_samples(const std::vector<TrialRecord>& records) {
  std::vector<CorrelationSample> samples;
  samples.reserve(records.size());
  for (const TrialRecord& rec : records) {
    require(rec.setting_pair >= 1 && rec.setting_pair <= 4,
            "correlation_samples: record has no drawn setting pair");
    samples.push_back(CorrelationSample{rec.setting_pair, rec.outcome1, rec.outcome4});
  }
  return samples;
}

/// The exact mixed state of pair (1,4) after D measures (2,3) in `d_basis`
/// but before any outcome is revealed: sum_k p_k |relative_k><relative_k|.
/// For any complete orthonormal basis this equals the unconditioned marginal
/// I/4 — measuring at D cannot steer C's unconditioned statistics.
inline DensityMatrix conditional_mixture(const std::vector<StateVector>& d_basis) {
  const StateVector joint = joint_state();
  const SubsystemSpec measured{2, 3};
  const std::vector<double> probs = born_probabilities(joint, measured, d_basis);
  std::vector<double> weights;
  std::vector<DensityMatrix> terms;
  for (std::size_t k = 0; k < d_basis.size(); ++k) {
    if (probs[k] <= kZeroProbability) continue;
    weights.push_back(probs[k]);
    terms.push_back(density_from_pure(relative_state(joint, measured, d_basis[k])));
  }
  return mixture(weights, terms);
}

/// Sampled evidence that D's choice of action leaves C's unconditioned
/// statistics unchanged: total-variation distances between C's joint outcome
/// distributions under the three D actions, per setting pair.
struct NonsignalingReport {
  std::int64_t trials_per_action;
  /// [setting_pair - 1][comparison]: comparisons are bell-vs-zz,
  /// bell-vs-none, zz-vs-none.
  std::array<std::array<double, 3>, 4> tv_distance;
  double threshold;
  double max_tv;
  bool pass;
};

inline constexpr std::array<const char*, 3> kNonsignalingComparisons{"bell-vs-zz", "bell-vs-none",
                                                                     "zz-vs-none"};

/// Runs one broadcast-disabled ensemble per D action (with C drawing the
/// same uniform settings in all three) and compares C's joint (+-1, +-1)
/// outcome distributions per setting pair. The threshold is a 4-sigma
/// multinomial budget for the nominal bucket size n_trials/4.
inline NonsignalingReport nonsignaling_check(std::int64_t n_trials, std::uint64_t seed,
                                             const ChshSettings& settings) {
  require(n_trials >= 10000,
          "nonsignaling_check: need at least 10^4 trials for the statistical budget");

  constexpr std::array<StationDAction, 3> kActions{StationDAction::BellMeasurement,
                                                   StationDAction::ZZMeasurement,
                                                   StationDAction::NoMeasurement};
  // counts[action][setting_pair - 1][joint outcome], joint outcome index
  // 2*(outcome1 < 0) + (outcome4 < 0).
  std::array<std::array<std::array<std::int64_t, 4>, 4>, 3> counts{};
  for (std::size_t ai = 0; ai < kActions.size(); ++ai) {
    ExperimentConfig config;
    config.num_trials = n_trials;
    // Independent sub-seed per ensemble so the three runs share no streams.
    config.master_seed = rng_derive(seed, ai).next_u64();
    config.d_action = kActions[ai];
    config.broadcast_enabled = false;
    config.chsh_settings = settings;
    config.zz_forces_z_settings = false;
    for (const TrialRecord& rec : run_ensemble(config)) {
      const std::size_t pair_index = static_cast<std::size_t>(rec.setting_pair - 1);
      const std::size_t joint = 2 * (rec.outcome1 < 0 ? 1 : 0) + (rec.outcome4 < 0 ? 1 : 0);
      counts[ai][pair_index][joint] += 1;
    }
  }

  NonsignalingReport report{};
  report.trials_per_action = n_trials;
  report.threshold = 4.0 * std::sqrt(4.0 / static_cast<double>(n_trials));
  report.max_tv = 0.0;
  constexpr std::array<std::pair<std::size_t, std::size_t>, 3> kPairs{
      std::pair<std::size_t, std::size_t>{0, 1}, {0, 2}, {1, 2}};
  for (std::size_t sp = 0; sp < 4; ++sp) {
    for (std::size_t ci = 0; ci < kPairs.size(); ++ci) {
      const auto& lhs = counts[kPairs[ci].first][sp];
      const auto& rhs = counts[kPairs[ci].second][sp];
      std::int64_t lhs_total = 0;
      std::int64_t rhs_total = 0;
      for (std::size_t o = 0; o < 4; ++o) {
        lhs_total += lhs[o];
        rhs_total += rhs[o];
      }
      require(lhs_total > 0 && rhs_total > 0, "nonsignaling_check: empty setting-pair bucket");
      double tv = 0.0;
      for (std::size_t o = 0; o < 4; ++o) {
        tv += std::abs(static_cast<double>(lhs[o]) / static_cast<double>(lhs_total) -
                       static_cast<double>(rhs[o]) / static_cast<double>(rhs_total));
      }
      tv *= 0.5;
      report.tv_distance[sp][ci] = tv;
      report.max_tv = std::max(report.max_tv, tv);
    }
  }
  report.pass = report.max_tv < report.threshold;
  return report;
}

}  // namespace swapsim
