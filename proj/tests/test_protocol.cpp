#include <catch2/catch_amalgamated.hpp>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "swapsim/protocol.hpp"

using namespace swapsim;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("StationDAction labels", "[protocol]") {
  REQUIRE(to_string(StationDAction::BellMeasurement) == "bell");
  REQUIRE(to_string(StationDAction::ZZMeasurement) == "zz");
  REQUIRE(to_string(StationDAction::NoMeasurement) == "none");
  for (const StationDAction action : {StationDAction::BellMeasurement,
                                      StationDAction::ZZMeasurement,
                                      StationDAction::NoMeasurement}) {
    REQUIRE(station_d_action_from_string(to_string(action)) == action);
  }
  REQUIRE_FALSE(station_d_action_from_string("hadamard").has_value());
}

TEST_CASE("ExperimentConfig validation", "[protocol]") {
  SECTION("defaults validate") {
    REQUIRE_NOTHROW(ExperimentConfig{}.validate());
  }
  SECTION("negative trial counts are rejected") {
    ExperimentConfig config;
    config.num_trials = -1;
    REQUIRE_THROWS_WITH(config.validate(), ContainsSubstring("nonnegative"));
  }
  SECTION("selection needs a Bell measurement") {
    ExperimentConfig config;
    config.d_action = StationDAction::ZZMeasurement;
    config.selection_target = BellOutcome::PsiMinus;
    REQUIRE_THROWS_WITH(config.validate(), ContainsSubstring("Bell measurement"));
  }
  SECTION("selection needs the broadcast channel") {
    ExperimentConfig config;
    config.broadcast_enabled = false;
    config.selection_target = BellOutcome::PsiMinus;
    REQUIRE_THROWS_WITH(config.validate(), ContainsSubstring("broadcast"));
  }
}

TEST_CASE("run_trial", "[protocol]") {
  ExperimentConfig config;
  config.master_seed = 11;

  SECTION("is a pure function of seed and trial id") {
    const TrialRecord a = run_trial(config, 3);
    const TrialRecord b = run_trial(config, 3);
    REQUIRE(a == b);
  }
  SECTION("different trials give independent data") {
    bool any_difference = false;
    const TrialRecord first = run_trial(config, 0);
    for (std::int64_t k = 1; k < 8 && !any_difference; ++k) {
      const TrialRecord rec = run_trial(config, k);
      any_difference = rec.d_outcome != first.d_outcome || rec.setting_pair != first.setting_pair ||
                       rec.outcome1 != first.outcome1 || rec.outcome4 != first.outcome4;
    }
    REQUIRE(any_difference);
  }
  SECTION("Bell mode records a Bell label and a drawn setting pair") {
    for (std::int64_t k = 0; k < 20; ++k) {
      const TrialRecord rec = run_trial(config, k);
      REQUIRE(rec.trial_id == k);
      REQUIRE(rec.master_seed == 11);
      REQUIRE(rec.d_action == StationDAction::BellMeasurement);
      REQUIRE(rec.d_outcome.has_value());
      REQUIRE(bell_outcome_from_string(*rec.d_outcome).has_value());
      REQUIRE(rec.message_delivered);
      REQUIRE(rec.setting_pair >= 1);
      REQUIRE(rec.setting_pair <= 4);
      REQUIRE((rec.outcome1 == 1 || rec.outcome1 == -1));
      REQUIRE((rec.outcome4 == 1 || rec.outcome4 == -1));
    }
  }
  SECTION("zz mode pins the settings and anticorrelates each side with D's bits") {
    config.d_action = StationDAction::ZZMeasurement;
    for (std::int64_t k = 0; k < 50; ++k) {
      const TrialRecord rec = run_trial(config, k);
      REQUIRE(rec.setting_pair == 0);
      REQUIRE(rec.d_outcome.has_value());
      REQUIRE(rec.d_outcome->size() == 2);
      // Each source pair is a singlet, so along z qubit 1 opposes qubit 2 and
      // qubit 4 opposes qubit 3 deterministically.
      const int expected1 = (*rec.d_outcome)[0] == '1' ? +1 : -1;
      const int expected4 = (*rec.d_outcome)[1] == '1' ? +1 : -1;
      REQUIRE(rec.outcome1 == expected1);
      REQUIRE(rec.outcome4 == expected4);
    }
  }
  SECTION("zz mode draws CHSH settings when the forcing flag is off") {
    config.d_action = StationDAction::ZZMeasurement;
    config.zz_forces_z_settings = false;
    const TrialRecord rec = run_trial(config, 0);
    REQUIRE(rec.setting_pair >= 1);
    REQUIRE(rec.setting_pair <= 4);
  }
  SECTION("no-measurement mode leaves no outcome at D") {
    config.d_action = StationDAction::NoMeasurement;
    for (std::int64_t k = 0; k < 10; ++k) {
      const TrialRecord rec = run_trial(config, k);
      REQUIRE_FALSE(rec.d_outcome.has_value());
      REQUIRE(rec.setting_pair >= 1);
      REQUIRE(rec.setting_pair <= 4);
    }
  }
  SECTION("disabling the broadcast keeps D's local record but marks no delivery") {
    config.broadcast_enabled = false;
    const TrialRecord rec = run_trial(config, 5);
    REQUIRE_FALSE(rec.message_delivered);
    REQUIRE(rec.d_outcome.has_value());
  }
  SECTION("negative trial ids are rejected") {
    REQUIRE_THROWS_WITH(run_trial(config, -1), ContainsSubstring("nonnegative"));
  }
}

TEST_CASE("run_ensemble", "[protocol]") {
  ExperimentConfig config;
  config.num_trials = 64;
  config.master_seed = 19;
  const std::vector<TrialRecord> records = run_ensemble(config);

  SECTION("one record per trial, in order") {
    REQUIRE(records.size() == 64);
    for (std::int64_t k = 0; k < 64; ++k) {
      REQUIRE(records[static_cast<std::size_t>(k)].trial_id == k);
    }
  }
  SECTION("matches independently recomputed trials") {
    for (const std::int64_t k : {0, 17, 63}) {
      REQUIRE(records[static_cast<std::size_t>(k)] == run_trial(config, k));
    }
  }
  SECTION("an empty run is allowed") {
    config.num_trials = 0;
    REQUIRE(run_ensemble(config).empty());
  }
}

TEST_CASE("broadcast", "[protocol]") {
  ExperimentConfig config;
  config.master_seed = 23;
  SECTION("delivered messages mirror the record") {
    const TrialRecord rec = run_trial(config, 2);
    const std::optional<ClassicalMessage> msg = broadcast(rec);
    REQUIRE(msg.has_value());
    REQUIRE(msg->trial_id == 2);
    REQUIRE(msg->action == StationDAction::BellMeasurement);
    REQUIRE(msg->outcome == rec.d_outcome);
  }
  SECTION("a disabled channel delivers nothing") {
    config.broadcast_enabled = false;
    REQUIRE_FALSE(broadcast(run_trial(config, 2)).has_value());
  }
}

TEST_CASE("post_select", "[protocol]") {
  ExperimentConfig config;
  config.num_trials = 400;
  config.master_seed = 29;
  const std::vector<TrialRecord> records = run_ensemble(config);

  SECTION("keeps exactly the trials whose message reports the target") {
    std::size_t total = 0;
    for (const BellOutcome target : kBellOutcomes) {
      const std::vector<TrialRecord> selected = post_select(records, target);
      total += selected.size();
      for (const TrialRecord& rec : selected) {
        REQUIRE(rec.d_outcome == to_string(target));
      }
      REQUIRE_FALSE(selected.empty());  // 400 trials at 1/4 each: all labels occur
    }
    REQUIRE(total == records.size());
  }
  SECTION("selection preserves trial order") {
    const std::vector<TrialRecord> selected = post_select(records, BellOutcome::PhiPlus);
    for (std::size_t k = 1; k < selected.size(); ++k) {
      REQUIRE(selected[k - 1].trial_id < selected[k].trial_id);
    }
  }
  SECTION("selection without any delivered message is impossible") {
    config.broadcast_enabled = false;
    const std::vector<TrialRecord> silent = run_ensemble(config);
    REQUIRE_THROWS_AS(post_select(silent, BellOutcome::PsiMinus), std::domain_error);
    REQUIRE_THROWS_WITH(post_select(silent, BellOutcome::PsiMinus),
                        ContainsSubstring("classical information"));
  }
  SECTION("records from a non-Bell run are rejected") {
    config.d_action = StationDAction::ZZMeasurement;
    const std::vector<TrialRecord> zz = run_ensemble(config);
    REQUIRE_THROWS_WITH(post_select(zz, BellOutcome::PsiMinus),
                        ContainsSubstring("Bell-measurement"));
  }
  SECTION("an empty record list selects to an empty list") {
    REQUIRE(post_select({}, BellOutcome::PsiMinus).empty());
  }
}

TEST_CASE("correlation_samples", "[protocol]") {
  ExperimentConfig config;
  config.num_trials = 16;
  config.master_seed = 31;
  const std::vector<TrialRecord> records = run_ensemble(config);
  SECTION("copies the CHSH-relevant fields") {
    const std::vector<CorrelationSample> samples = correlation_samples(records);
    REQUIRE(samples.size() == records.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
      REQUIRE(samples[k].setting_pair == records[k].setting_pair);
      REQUIRE(samples[k].outcome1 == records[k].outcome1);
      REQUIRE(samples[k].outcome4 == records[k].outcome4);
    }
  }
  SECTION("records without a drawn setting pair are rejected") {
    config.d_action = StationDAction::ZZMeasurement;
    const std::vector<TrialRecord> forced = run_ensemble(config);
    REQUIRE_THROWS_WITH(correlation_samples(forced), ContainsSubstring("setting pair"));
  }
}

TEST_CASE("conditional_mixture", "[protocol]") {
  SECTION("averaging over Bell outcomes leaves the outer pair maximally mixed") {
    const DensityMatrix mix = conditional_mixture(bell_basis());
    REQUIRE(mix.max_abs_difference(maximally_mixed(2)) < 1e-12);
  }
  SECTION("averaging over z outcomes gives the same marginal") {
    const DensityMatrix mix = conditional_mixture(computational_basis(2));
    REQUIRE(mix.max_abs_difference(maximally_mixed(2)) < 1e-12);
  }
}

TEST_CASE("selected sub-ensembles show the swapped correlations", "[protocol][statistics]") {
  ExperimentConfig config;
  config.num_trials = 5000;
  config.master_seed = 2026;
  const std::vector<TrialRecord> records = run_ensemble(config);

  SECTION("Bell labels occur in near-equal proportion") {
    for (const BellOutcome target : kBellOutcomes) {
      const double freq = static_cast<double>(post_select(records, target).size()) /
                          static_cast<double>(records.size());
      REQUIRE(freq > 0.2255);  // 4 sigma around 1/4 at n = 5000
      REQUIRE(freq < 0.2745);
    }
  }
  SECTION("the full unselected ensemble carries no CHSH signal") {
    const ChshEstimate all = chsh_estimate(correlation_samples(records));
    REQUIRE(std::abs(all.s_value) < 4.0 * all.s_std_error);
  }
  SECTION("the psi-minus sub-ensemble reproduces the singlet value") {
    const std::vector<TrialRecord> selected = post_select(records, BellOutcome::PsiMinus);
    const ChshEstimate est = chsh_estimate(correlation_samples(selected));
    const double exact = chsh_exact(density_from_pure(bell_state(BellOutcome::PsiMinus)),
                                    config.chsh_settings);
    REQUIRE(exact == Approx(-2.0 * std::sqrt(2.0)));
    REQUIRE(std::abs(est.s_value - exact) < 4.0 * est.s_std_error);
    REQUIRE(std::abs(est.s_value) > 2.0);
  }
  SECTION("the phi-plus sub-ensemble lands at the opposite extreme") {
    const std::vector<TrialRecord> selected = post_select(records, BellOutcome::PhiPlus);
    const ChshEstimate est = chsh_estimate(correlation_samples(selected));
    REQUIRE(std::abs(est.s_value - 2.0 * std::sqrt(2.0)) < 4.0 * est.s_std_error);
  }
}

TEST_CASE("nonsignaling_check", "[protocol][statistics]") {
  SECTION("small trial counts are rejected") {
    REQUIRE_THROWS_WITH(nonsignaling_check(100, 1, default_chsh_settings()),
                        ContainsSubstring("10^4"));
  }
  SECTION("D's action does not move C's unconditioned statistics") {
    const NonsignalingReport report = nonsignaling_check(10000, 7, default_chsh_settings());
    REQUIRE(report.trials_per_action == 10000);
    REQUIRE(report.threshold == Approx(0.08));
    REQUIRE(report.pass);
    REQUIRE(report.max_tv < report.threshold);
    double largest = 0.0;
    for (const auto& row : report.tv_distance) {
      for (const double tv : row) {
        REQUIRE(tv >= 0.0);
        largest = std::max(largest, tv);
      }
    }
    REQUIRE(largest == Approx(report.max_tv));
  }
}
