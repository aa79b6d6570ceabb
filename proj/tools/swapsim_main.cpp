// Command-line front end for the swapsim library.
//
// Subcommands:
//   verify    -- exact algebraic identities of the swapping protocol
//   swap      -- run a trial ensemble, post-select, estimate CHSH
//   chsh      -- exact CHSH values for the conditioned pair states
//   marginals -- evidence that D's action cannot signal to C
//
// Every command prints a human-readable report and emits the same numbers in
// a machine-readable JSON object {config, results, checks[]}. Exit status is
// 0 when every check passes, 1 when any check fails, 2 on usage errors.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "swapsim/swapsim.hpp"

namespace {

using nlohmann::ordered_json;
using namespace swapsim;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

/// RNG stream id reserved for offline analysis draws (random-subset
/// sampling); trial streams are 2k and 2k+1, far below this.
constexpr std::uint64_t kAnalysisStream = 0x8000000000000000ULL;

struct CliConfig {
  std::int64_t trials = 100000;
  std::uint64_t seed = 42;
  std::string d_action = "bell";
  std::string select;  // empty = not requested
  std::vector<double> settings_degrees{0.0, 90.0, 45.0, 135.0};
  std::string out_path;     // empty = no record file
  std::string format = "json";
  std::string report_path;  // empty = JSON report goes to stdout
  bool corrupt = false;     // verify-only fault-injection hook
  bool d_action_given = false;
};

struct Check {
  std::string name;
  std::string detail;
  double value;
  double tolerance;
  bool pass;
};

/// Check that passes when value <= tolerance (residual-style).
Check residual_check(std::string name, std::string detail, double value, double tolerance) {
  const bool pass = value <= tolerance;
  return Check{std::move(name), std::move(detail), value, tolerance, pass};
}

ChshSettings settings_from(const CliConfig& cfg) {
  require(cfg.settings_degrees.size() == 4,
          "--settings needs exactly four angles a,a',b,b' in degrees");
  return ChshSettings::from_polar_degrees(cfg.settings_degrees[0], cfg.settings_degrees[1],
                                          cfg.settings_degrees[2], cfg.settings_degrees[3]);
}

ordered_json config_json(const std::string& command, const CliConfig& cfg) {
  ordered_json j;
  j["command"] = command;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["d_action"] = cfg.d_action;
  j["select"] = cfg.select.empty() ? ordered_json(nullptr) : ordered_json(cfg.select);
  j["settings_degrees"] = cfg.settings_degrees;
  j["out"] = cfg.out_path.empty() ? ordered_json(nullptr) : ordered_json(cfg.out_path);
  j["format"] = cfg.format;
  return j;
}

ordered_json checks_json(const std::vector<Check>& checks) {
  ordered_json arr = ordered_json::array();
  for (const Check& c : checks) {
    ordered_json j;
    j["name"] = c.name;
    j["detail"] = c.detail;
    j["value"] = c.value;
    j["tolerance"] = c.tolerance;
    j["pass"] = c.pass;
    arr.push_back(std::move(j));
  }
  return arr;
}

/// Prints the check table and the JSON report, then maps the verdict to an
/// exit status.
int finish(const std::string& command, const CliConfig& cfg, ordered_json results,
           const std::vector<Check>& checks) {
  std::size_t passed = 0;
  for (const Check& c : checks) {
    std::printf("  check %-36s %s  value=%.6g tolerance=%.3g\n", c.name.c_str(),
                c.pass ? "PASS" : "FAIL", c.value, c.tolerance);
    if (c.pass) ++passed;
  }
  const bool all_pass = passed == checks.size();
  std::printf("result: %s (%zu/%zu checks)\n", all_pass ? "PASS" : "FAIL", passed, checks.size());

  ordered_json report;
  report["config"] = config_json(command, cfg);
  report["results"] = std::move(results);
  report["checks"] = checks_json(checks);
  const std::string dump = report.dump(2);
  if (cfg.report_path.empty()) {
    std::printf("%s\n", dump.c_str());
  } else {
    std::ofstream out(cfg.report_path);
    require(out.good(), "cannot open report file: " + cfg.report_path);
    out << dump << '\n';
  }
  return all_pass ? kExitPass : kExitCheckFailure;
}

double max_distance_from(const DensityMatrix& rho, const DensityMatrix& target) {
  return rho.max_abs_difference(target);
}

// ---------------------------------------------------------------------------
// verify: exact identities, no sampling.
// ---------------------------------------------------------------------------

int cmd_verify(const CliConfig& cfg) {
  std::printf("swapsim verify\n");
  std::vector<Check> checks;
  const StateVector joint = joint_state();
  const SubsystemSpec d_pair{2, 3};
  const SubsystemSpec pair_order{1, 4, 2, 3};

  // Four-qubit source state: +1/2 at 0101 and 1010, -1/2 at 0110 and 1001.
  {
    std::vector<cdouble> amps = joint.amplitudes();
    if (cfg.corrupt) amps[5] += cdouble{1e-3, 0.0};  // fault-injection hook
    double residual = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
      double expected = 0.0;
      if (i == 5 || i == 10) expected = 0.5;
      if (i == 6 || i == 9) expected = -0.5;
      residual = std::max(residual, std::abs(amps[i] - cdouble{expected, 0.0}));
    }
    checks.push_back(residual_check(
        "joint-state-amplitudes",
        "max |amplitude - expected| over the 16 amplitudes of the two-singlet state", residual,
        kAlgebraTol));
  }

  // Regrouped over pairs (1,4)(2,3) the same state reads
  // (|01,10> - |00,11> - |11,00> + |10,01>)/2.
  {
    const StateVector perm = permute_qubits(joint, pair_order);
    double residual = 0.0;
    for (std::uint64_t i = 0; i < perm.dim(); ++i) {
      double expected = 0.0;
      if (i == 0x6 || i == 0x9) expected = 0.5;
      if (i == 0x3 || i == 0xC) expected = -0.5;
      residual = std::max(residual, std::abs(perm.amplitude(i) - cdouble{expected, 0.0}));
    }
    checks.push_back(residual_check(
        "pair-regrouping-identity",
        "residual of the computational-basis regrouping over pairs (1,4) and (2,3)", residual,
        kAlgebraTol));
  }

  // In the Bell basis of both pairs the coefficients are
  // (psi+ psi+ - psi- psi- - phi+ phi+ + phi- phi-)/2; rebuilding the state
  // from that expansion must reproduce the original exactly.
  {
    const std::array<double, 4> signs{0.5, -0.5, -0.5, 0.5};
    std::vector<cdouble> combined(16, cdouble{0.0, 0.0});
    for (std::size_t k = 0; k < 4; ++k) {
      const StateVector term =
          tensor(bell_state(kBellOutcomes[k]), bell_state(kBellOutcomes[k]));
      for (std::uint64_t i = 0; i < term.dim(); ++i) {
        combined[i] += signs[k] * term.amplitude(i);
      }
    }
    const StateVector rebuilt =
        permute_qubits(StateVector(4, std::move(combined)), inverse_permutation(pair_order));
    double residual = 0.0;
    for (std::uint64_t i = 0; i < rebuilt.dim(); ++i) {
      residual = std::max(residual, std::abs(rebuilt.amplitude(i) - joint.amplitude(i)));
    }
    checks.push_back(residual_check(
        "bell-regrouping-identity",
        "residual of the Bell-basis regrouping with signs (+,-,-,+) over both pairs", residual,
        kAlgebraTol));
  }

  // Tracing out the measured pair leaves (1,4) maximally mixed.
  const DensityMatrix reduced =
      partial_trace(density_from_pure(joint), SubsystemSpec{1, 4}, 4);
  const DensityMatrix mixed = maximally_mixed(2);
  checks.push_back(residual_check("reduced-state-maximally-mixed",
                                  "max-entry distance of the (1,4) marginal from I/4",
                                  max_distance_from(reduced, mixed), kAlgebraTol));

  // The Born-weighted mixture of conditional (1,4) states equals that same
  // marginal, for the Bell basis and for the computational basis at D.
  checks.push_back(residual_check(
      "conditional-mixture-bell-basis",
      "distance of the Bell-outcome mixture of conditional (1,4) states from I/4",
      max_distance_from(conditional_mixture(bell_basis()), mixed), kAlgebraTol));
  checks.push_back(residual_check(
      "conditional-mixture-computational-basis",
      "distance of the computational-outcome mixture of conditional (1,4) states from I/4",
      max_distance_from(conditional_mixture(computational_basis(2)), mixed), kAlgebraTol));

  // Separability classification of both sides of the swap.
  {
    const PptResult unconditioned = ppt_check(reduced);
    checks.push_back(Check{"ppt-reduced-separable",
                           "partial-transpose minimum eigenvalue of the unconditioned (1,4) "
                           "marginal; separable iff >= tolerance",
                           unconditioned.min_eigenvalue, kPsdFloor, unconditioned.separable});
    const PptResult entangled = ppt_check(density_from_pure(singlet()));
    checks.push_back(Check{"ppt-singlet-entangled",
                           "partial-transpose minimum eigenvalue of a singlet pair; entangled "
                           "iff < tolerance (exact value -1/2)",
                           entangled.min_eigenvalue, kPsdFloor,
                           !entangled.separable &&
                               std::abs(entangled.min_eigenvalue + 0.5) <= kAlgebraTol});
  }

  // Finding (2,3) in |00> forces (1,4) into |11> with certainty.
  checks.push_back(residual_check(
      "relative-state-zz-certainty",
      "1 - fidelity of the (1,4) state conditioned on (2,3)=|00> with |11>",
      1.0 - fidelity_pure(relative_state(joint, d_pair, StateVector::basis_state(2, 0)),
                          StateVector::basis_state(2, 3)),
      kAlgebraTol));

  // Each Bell outcome at D leaves (1,4) in the matching Bell state.
  {
    double worst = 0.0;
    for (BellOutcome label : kBellOutcomes) {
      const StateVector conditioned = relative_state(joint, d_pair, bell_state(label));
      worst = std::max(worst, 1.0 - fidelity_pure(conditioned, bell_state(label)));
    }
    checks.push_back(residual_check(
        "relative-state-bell-partners",
        "max over outcomes of 1 - fidelity of the conditional (1,4) state with the same "
        "Bell state",
        worst, kAlgebraTol));
  }

  // Singlet correlator closed form E(angle) = -cos(angle).
  {
    const DensityMatrix singlet_density = density_from_pure(singlet());
    double worst = 0.0;
    for (double theta : {0.0, 0.25 * M_PI, 0.5 * M_PI}) {
      const double e =
          correlator_exact(singlet_density, Vec3{0.0, 0.0, 1.0}, polar_direction(theta));
      worst = std::max(worst, std::abs(e + std::cos(theta)));
    }
    checks.push_back(residual_check("singlet-correlator-closed-form",
                                    "max |E(theta) + cos(theta)| for a singlet pair at relative "
                                    "angles 0, 45, 90 degrees",
                                    worst, kAlgebraTol));
  }

  // D's Bell measurement has four equally likely outcomes.
  {
    const std::vector<double> probs = born_probabilities(joint, d_pair, bell_basis());
    double worst = 0.0;
    for (double p : probs) worst = std::max(worst, std::abs(p - 0.25));
    checks.push_back(residual_check("bell-outcome-quarters",
                                    "max |probability - 1/4| over the four Bell outcomes at D",
                                    worst, kAlgebraTol));
  }

  // Outcomes the source state forbids: (2,3,4) all-equal bitstrings never
  // occur.
  {
    const std::vector<double> probs =
        born_probabilities(joint, SubsystemSpec{2, 3, 4}, computational_basis(3));
    checks.push_back(residual_check("excluded-outcomes",
                                    "probability of the impossible (2,3,4) patterns 000 and 111",
                                    std::max(probs[0], probs[7]), kAlgebraTol));
  }

  double max_residual = 0.0;
  for (const Check& c : checks) {
    if (c.name.rfind("ppt-", 0) == 0) continue;  // eigenvalue checks, not residuals
    max_residual = std::max(max_residual, c.value);
  }
  std::printf("  max residual over exact identities: %.3e\n", max_residual);

  ordered_json results;
  results["max_residual"] = max_residual;
  return finish("verify", cfg, std::move(results), checks);
}

// ---------------------------------------------------------------------------
// chsh: exact values, no sampling.
// ---------------------------------------------------------------------------

int cmd_chsh(const CliConfig& cfg) {
  const ChshSettings settings = settings_from(cfg);
  std::printf("swapsim chsh: settings %g,%g,%g,%g degrees\n", cfg.settings_degrees[0],
              cfg.settings_degrees[1], cfg.settings_degrees[2], cfg.settings_degrees[3]);

  const StateVector joint = joint_state();
  const double quantum_bound = 2.0 * std::sqrt(2.0);
  std::vector<Check> checks;
  ordered_json s_values;
  for (BellOutcome label : kBellOutcomes) {
    const StateVector conditioned = relative_state(joint, SubsystemSpec{2, 3}, bell_state(label));
    const double s = chsh_exact(density_from_pure(conditioned), settings);
    std::printf("  conditioned on %-4s  S = %+.9f\n", to_string(label).c_str(), s);
    s_values[to_string(label)] = s;
    checks.push_back(residual_check("quantum-bound-" + to_string(label),
                                    "|S| of the (1,4) state conditioned on this Bell outcome "
                                    "must not exceed 2*sqrt(2)",
                                    std::abs(s), quantum_bound + kUnitVectorTol));
  }
  const double s_mixed = chsh_exact(maximally_mixed(2), settings);
  std::printf("  unconditioned I/4    S = %+.9f\n", s_mixed);
  s_values["mixed"] = s_mixed;
  checks.push_back(residual_check("mixed-state-zero",
                                  "|S| of the unconditioned maximally mixed (1,4) state",
                                  std::abs(s_mixed), kAlgebraTol));

  ordered_json results;
  results["s_exact"] = std::move(s_values);
  results["quantum_bound"] = quantum_bound;
  return finish("chsh", cfg, std::move(results), checks);
}

// ---------------------------------------------------------------------------
// swap: sampled ensemble with post-selection.
// ---------------------------------------------------------------------------

/// Uniform random subset of the records, equal in size to a selected subset,
/// drawn ignoring all outcome information.
std::vector<TrialRecord> chance_subset(const std::vector<TrialRecord>& records, std::size_t size,
                                       std::uint64_t seed) {
  RngStream rng = rng_derive(seed, kAnalysisStream);
  std::vector<std::size_t> index(records.size());
  std::iota(index.begin(), index.end(), std::size_t{0});
  for (std::size_t i = 0; i < size && i + 1 < index.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_index(index.size() - i));
    std::swap(index[i], index[j]);
  }
  std::vector<TrialRecord> subset;
  subset.reserve(size);
  for (std::size_t i = 0; i < size; ++i) subset.push_back(records[index[i]]);
  return subset;
}

void write_records(const std::vector<TrialRecord>& records, const std::string& path,
                   const std::string& format) {
  std::ofstream out(path);
  require(out.good(), "cannot open output file: " + path);
  if (format == "csv") {
    write_records_csv(records, out);
  } else {
    write_records_jsonl(records, out);
  }
  require(out.good(), "failed writing output file: " + path);
}

int cmd_swap(const CliConfig& cfg) {
  require(cfg.trials >= 1, "--trials must be at least 1");
  const std::optional<StationDAction> action = station_d_action_from_string(cfg.d_action);
  require(action.has_value(), "--d-action must be bell, zz, or none");

  std::string select = cfg.select;
  if (select.empty() && *action == StationDAction::BellMeasurement) select = "psi-";
  std::optional<BellOutcome> target;
  if (!select.empty()) {
    require(*action == StationDAction::BellMeasurement,
            "--select requires --d-action bell (selection reads Bell outcomes)");
    target = bell_outcome_from_string(select);
    require(target.has_value(), "--select must be psi+, psi-, phi+, or phi-");
  }

  ExperimentConfig config;
  config.num_trials = cfg.trials;
  config.master_seed = cfg.seed;
  config.d_action = *action;
  config.broadcast_enabled = true;
  config.chsh_settings = settings_from(cfg);
  config.selection_target = target;
  config.validate();

  std::printf("swapsim swap: trials=%lld seed=%llu d-action=%s%s%s\n",
              static_cast<long long>(cfg.trials), static_cast<unsigned long long>(cfg.seed),
              cfg.d_action.c_str(), select.empty() ? "" : " select=", select.c_str());

  const std::vector<TrialRecord> records = run_ensemble(config);
  if (!cfg.out_path.empty()) {
    write_records(records, cfg.out_path, cfg.format);
    std::printf("  wrote %zu records to %s (%s)\n", records.size(), cfg.out_path.c_str(),
                cfg.format.c_str());
  }

  std::vector<Check> checks;
  ordered_json results;
  results["num_records"] = records.size();
  results["records_written"] =
      cfg.out_path.empty() ? ordered_json(nullptr) : ordered_json(cfg.out_path);
  const double n = static_cast<double>(records.size());
  // 4-sigma binomial budget around 1/4 for outcome frequencies.
  const double freq_tol = 4.0 * std::sqrt(0.25 * 0.75 / n);

  if (*action == StationDAction::BellMeasurement) {
    std::array<std::int64_t, 4> counts{0, 0, 0, 0};
    for (const TrialRecord& rec : records) {
      counts[static_cast<std::size_t>(*bell_outcome_from_string(*rec.d_outcome))] += 1;
    }
    std::printf("  Bell outcome frequencies:\n");
    ordered_json freqs;
    for (std::size_t k = 0; k < 4; ++k) {
      const double f = static_cast<double>(counts[k]) / n;
      const std::string label = to_string(kBellOutcomes[k]);
      std::printf("    %-4s %.5f\n", label.c_str(), f);
      freqs[label] = f;
      checks.push_back(residual_check("frequency-" + label,
                                      "deviation of this Bell outcome frequency from 1/4 "
                                      "(4-sigma binomial budget)",
                                      std::abs(f - 0.25), freq_tol));
    }
    results["bell_frequencies"] = std::move(freqs);

    const std::vector<TrialRecord> selected = post_select(records, *target);
    const ChshEstimate est = chsh_estimate(correlation_samples(selected));
    const StateVector conditioned =
        relative_state(joint_state(), SubsystemSpec{2, 3}, bell_state(*target));
    const double s_exact = chsh_exact(density_from_pure(conditioned), config.chsh_settings);
    std::printf("  selected subset (%s): n=%zu\n", select.c_str(), selected.size());
    std::printf("    S = %+.4f +- %.4f   exact S for this conditioning = %+.4f\n", est.s_value,
                est.s_std_error, s_exact);
    checks.push_back(residual_check(
        "selected-matches-exact",
        "|estimated S - exact S| for the selected subset, in units of its standard error",
        std::abs(est.s_value - s_exact), 4.0 * est.s_std_error));

    ordered_json selected_json;
    selected_json["target"] = select;
    selected_json["count"] = selected.size();
    selected_json["s_value"] = est.s_value;
    selected_json["s_std_error"] = est.s_std_error;
    selected_json["s_exact"] = s_exact;
    if (std::abs(s_exact) > 2.0) {
      const double excess_sigma = (std::abs(est.s_value) - 2.0) / est.s_std_error;
      std::printf("    verdict: violates |S| <= 2 by %.1f sigma\n", excess_sigma);
      checks.push_back(Check{"selected-exceeds-classical-bound",
                             "(|S| - 2) / std_error for the selected subset; passes when "
                             "above the tolerance",
                             excess_sigma, 4.0, excess_sigma > 4.0});
      selected_json["excess_sigma_over_2"] = excess_sigma;
    } else {
      std::printf("    verdict: within classical bound |S| <= 2\n");
      checks.push_back(residual_check(
          "selected-within-classical-bound",
          "|S| of the selected subset against 2 plus four standard errors",
          std::abs(est.s_value), 2.0 + 4.0 * est.s_std_error));
    }
    results["selected"] = std::move(selected_json);

    const std::vector<TrialRecord> random_records =
        chance_subset(records, selected.size(), cfg.seed);
    const ChshEstimate rand_est = chsh_estimate(correlation_samples(random_records));
    std::printf("  chance subset (no outcome information): n=%zu\n", random_records.size());
    std::printf("    S = %+.4f +- %.4f\n", rand_est.s_value, rand_est.s_std_error);
    std::printf("    verdict: %s classical bound |S| <= 2\n",
                std::abs(rand_est.s_value) <= 2.0 + 4.0 * rand_est.s_std_error ? "within"
                                                                               : "violates");
    checks.push_back(residual_check(
        "chance-subset-classical-bound",
        "|S| of an equal-size subset selected by chance against 2 plus four standard errors",
        std::abs(rand_est.s_value), 2.0 + 4.0 * rand_est.s_std_error));
    ordered_json rand_json;
    rand_json["count"] = random_records.size();
    rand_json["s_value"] = rand_est.s_value;
    rand_json["s_std_error"] = rand_est.s_std_error;
    results["chance_subset"] = std::move(rand_json);
  } else if (*action == StationDAction::ZZMeasurement) {
    std::array<std::int64_t, 4> counts{0, 0, 0, 0};
    std::int64_t violations = 0;
    for (const TrialRecord& rec : records) {
      const std::string& d = *rec.d_outcome;
      const std::size_t idx =
          static_cast<std::size_t>((d[0] == '1' ? 2 : 0) + (d[1] == '1' ? 1 : 0));
      counts[idx] += 1;
      // Anticorrelation within each source pair fixes C's z outcomes:
      // qubit 1 is opposite to 2, qubit 4 opposite to 3.
      const int expected1 = d[0] == '1' ? +1 : -1;
      const int expected4 = d[1] == '1' ? +1 : -1;
      if (rec.outcome1 != expected1 || rec.outcome4 != expected4) ++violations;
    }
    std::printf("  D outcome frequencies (bits of qubits 2,3):\n");
    ordered_json freqs;
    const std::array<const char*, 4> labels{"00", "01", "10", "11"};
    for (std::size_t k = 0; k < 4; ++k) {
      const double f = static_cast<double>(counts[k]) / n;
      std::printf("    %s %.5f\n", labels[k], f);
      freqs[labels[k]] = f;
      checks.push_back(residual_check(std::string("frequency-") + labels[k],
                                      "deviation of this outcome frequency from 1/4 (4-sigma "
                                      "binomial budget)",
                                      std::abs(f - 0.25), freq_tol));
    }
    results["zz_frequencies"] = std::move(freqs);
    std::printf("  records violating the determined (1,4) outcomes: %lld\n",
                static_cast<long long>(violations));
    checks.push_back(residual_check("zz-outcome-consistency",
                                    "records whose C outcomes disagree with the outcome map "
                                    "determined by D's result",
                                    static_cast<double>(violations), 0.0));
    results["consistency_violations"] = violations;
  } else {
    // No measurement at D: C's outcome products average to zero at every
    // setting pair.
    std::array<double, 4> sums{0.0, 0.0, 0.0, 0.0};
    std::array<std::int64_t, 4> counts{0, 0, 0, 0};
    for (const TrialRecord& rec : records) {
      const std::size_t k = static_cast<std::size_t>(rec.setting_pair - 1);
      sums[k] += static_cast<double>(rec.outcome1 * rec.outcome4);
      counts[k] += 1;
    }
    std::printf("  mean outcome products per setting pair:\n");
    ordered_json means = ordered_json::array();
    for (std::size_t k = 0; k < 4; ++k) {
      require(counts[k] > 0, "no trials drew setting pair " + std::to_string(k + 1) +
                                 "; increase --trials");
      const double mean = sums[k] / static_cast<double>(counts[k]);
      std::printf("    pair %zu: %+.5f (n=%lld)\n", k + 1, mean,
                  static_cast<long long>(counts[k]));
      ordered_json entry;
      entry["setting_pair"] = k + 1;
      entry["mean_product"] = mean;
      entry["count"] = counts[k];
      means.push_back(std::move(entry));
      checks.push_back(residual_check(
          "uncorrelated-pair-" + std::to_string(k + 1),
          "|mean outcome product| with no measurement at D (4-sigma budget)", std::abs(mean),
          4.0 / std::sqrt(static_cast<double>(counts[k]))));
    }
    results["mean_products"] = std::move(means);
  }

  return finish("swap", cfg, std::move(results), checks);
}

// ---------------------------------------------------------------------------
// marginals: exact and sampled evidence of non-signaling.
// ---------------------------------------------------------------------------

int cmd_marginals(const CliConfig& cfg) {
  require(cfg.trials >= 10000, "--trials must be at least 10000 for the statistical budget");
  const ChshSettings settings = settings_from(cfg);
  std::printf("swapsim marginals: trials=%lld seed=%llu\n", static_cast<long long>(cfg.trials),
              static_cast<unsigned long long>(cfg.seed));

  std::vector<std::string> actions{"bell", "zz", "none"};
  if (cfg.d_action_given) actions = {cfg.d_action};

  std::vector<Check> checks;
  const DensityMatrix mixed = maximally_mixed(2);
  ordered_json exact_json;
  std::printf("  exact (1,4) marginal distance from I/4, per D action:\n");
  for (const std::string& name : actions) {
    double dist = 0.0;
    if (name == "bell") {
      dist = max_distance_from(conditional_mixture(bell_basis()), mixed);
    } else if (name == "zz") {
      dist = max_distance_from(conditional_mixture(computational_basis(2)), mixed);
    } else {
      dist = max_distance_from(
          partial_trace(density_from_pure(joint_state()), SubsystemSpec{1, 4}, 4), mixed);
    }
    std::printf("    %-4s %.3e\n", name.c_str(), dist);
    exact_json[name] = dist;
    checks.push_back(residual_check("exact-marginal-" + name,
                                    "distance of the exact post-D (1,4) mixed state from I/4",
                                    dist, kAlgebraTol));
  }

  ordered_json sampled_json;
  if (cfg.d_action_given) {
    // A single D action compared with itself: the distances are identically
    // zero; kept as the degenerate case of the table.
    std::printf("  sampled comparison restricted to %s: self-distance 0 by definition\n",
                cfg.d_action.c_str());
    sampled_json["comparisons"] = ordered_json::array();
    ordered_json table;
    for (int pair = 1; pair <= 4; ++pair) {
      table["setting_pair_" + std::to_string(pair)] =
          ordered_json::object({{cfg.d_action + "-vs-" + cfg.d_action, 0.0}});
    }
    sampled_json["tv_distance"] = std::move(table);
    sampled_json["max_tv"] = 0.0;
    sampled_json["threshold"] = 4.0 * std::sqrt(4.0 / static_cast<double>(cfg.trials));
    checks.push_back(residual_check("sampled-tv-max",
                                    "largest total-variation distance across D actions "
                                    "(self-comparison)",
                                    0.0, 4.0 * std::sqrt(4.0 / static_cast<double>(cfg.trials))));
  } else {
    const NonsignalingReport report = nonsignaling_check(cfg.trials, cfg.seed, settings);
    std::printf("  total-variation distances of C's joint outcome distribution:\n");
    std::printf("    %-14s %-12s %-12s %-12s\n", "setting pair", kNonsignalingComparisons[0],
                kNonsignalingComparisons[1], kNonsignalingComparisons[2]);
    ordered_json table;
    for (std::size_t sp = 0; sp < 4; ++sp) {
      std::printf("    %-14zu %-12.5f %-12.5f %-12.5f\n", sp + 1, report.tv_distance[sp][0],
                  report.tv_distance[sp][1], report.tv_distance[sp][2]);
      ordered_json row;
      for (std::size_t ci = 0; ci < 3; ++ci) {
        row[kNonsignalingComparisons[ci]] = report.tv_distance[sp][ci];
      }
      table["setting_pair_" + std::to_string(sp + 1)] = std::move(row);
    }
    std::printf("  max TV %.5f against threshold %.5f\n", report.max_tv, report.threshold);
    sampled_json["tv_distance"] = std::move(table);
    sampled_json["max_tv"] = report.max_tv;
    sampled_json["threshold"] = report.threshold;
    sampled_json["trials_per_action"] = report.trials_per_action;
    checks.push_back(residual_check("sampled-tv-max",
                                    "largest total-variation distance between C's unconditioned "
                                    "outcome distributions across D actions (4-sigma budget)",
                                    report.max_tv, report.threshold));
  }

  ordered_json results;
  results["exact_distance"] = std::move(exact_json);
  results["sampled"] = std::move(sampled_json);
  return finish("marginals", cfg, std::move(results), checks);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statevector simulator of the two-source entanglement-swapping protocol"};
  app.require_subcommand(1);
  CliConfig cfg;

  CLI::App* verify = app.add_subcommand(
      "verify", "Check the exact algebraic identities of the protocol state");
  verify->add_option("--report", cfg.report_path, "Write the JSON report to this file");
  verify->add_flag("--corrupt", cfg.corrupt, "Perturb an audited amplitude (fault-injection hook)")
      ->group("");

  CLI::App* swap_cmd = app.add_subcommand(
      "swap", "Run the trial ensemble, post-select on a Bell outcome, estimate CHSH");
  swap_cmd->add_option("--trials", cfg.trials, "Number of trials")->capture_default_str();
  swap_cmd->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  swap_cmd->add_option("--d-action", cfg.d_action, "Station D action")
      ->check(CLI::IsMember({"bell", "zz", "none"}))
      ->capture_default_str();
  swap_cmd->add_option("--select", cfg.select, "Bell outcome to post-select (default psi- in bell mode)")
      ->check(CLI::IsMember({"psi+", "psi-", "phi+", "phi-"}));
  swap_cmd
      ->add_option("--settings", cfg.settings_degrees,
                   "CHSH polar angles a,a',b,b' in degrees (x-z plane)")
      ->delimiter(',')
      ->expected(4);
  swap_cmd->add_option("--out", cfg.out_path, "Write trial records to this file");
  swap_cmd->add_option("--format", cfg.format, "Record file format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  swap_cmd->add_option("--report", cfg.report_path, "Write the JSON report to this file");

  CLI::App* chsh_cmd = app.add_subcommand(
      "chsh", "Exact CHSH values of the conditioned (1,4) states, no sampling");
  chsh_cmd
      ->add_option("--settings", cfg.settings_degrees,
                   "CHSH polar angles a,a',b,b' in degrees (x-z plane)")
      ->delimiter(',')
      ->expected(4);
  chsh_cmd->add_option("--report", cfg.report_path, "Write the JSON report to this file");

  CLI::App* marginals = app.add_subcommand(
      "marginals", "Exact and sampled evidence that D's action cannot signal to C");
  marginals->add_option("--trials", cfg.trials, "Trials per D action")->capture_default_str();
  marginals->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  CLI::Option* marg_action =
      marginals->add_option("--d-action", cfg.d_action, "Restrict to one D action (self-comparison)")
          ->check(CLI::IsMember({"bell", "zz", "none"}));
  marginals
      ->add_option("--settings", cfg.settings_degrees,
                   "CHSH polar angles a,a',b,b' in degrees (x-z plane)")
      ->delimiter(',')
      ->expected(4);
  marginals->add_option("--report", cfg.report_path, "Write the JSON report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  cfg.d_action_given = marg_action->count() > 0;
  try {
    if (verify->parsed()) return cmd_verify(cfg);
    if (swap_cmd->parsed()) return cmd_swap(cfg);
    if (chsh_cmd->parsed()) return cmd_chsh(cfg);
    if (marginals->parsed()) return cmd_marginals(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
