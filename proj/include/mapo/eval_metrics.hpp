// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mapo/dialogue_sim.hpp"
#include "mapo/empathy_state.hpp"

namespace mapo {

/// Cosine between the realized delta and Normalize(-deficit_before).
/// Empty when either vector has norm below 1e-12.
std::optional<double> alignment_score(const DeficitState& deficit_before, const JudgeDelta& delta);

struct AlignmentRecord {
  int turn_index = 0;
  DeficitState deficit_before;
  JudgeDelta delta;
  std::optional<double> alignment;
};

std::vector<AlignmentRecord> alignment_records(const EpisodeOutcome& episode);

/// Fraction of episodes that ended in success. Throws EvaluationError when empty.
double success_rate(std::span<const EpisodeOutcome> outcomes);

struct ScenarioEpisode {
  Scenario scenario;
  EpisodeOutcome outcome;
};

struct AxisStats {
  Axis axis = Axis::Cognitive;
  int episodes = 0;
  int successes = 0;
  int alignment_count = 0;  // defined alignment records only
  double alignment_sum = 0.0;

  double success_rate() const { return episodes ? static_cast<double>(successes) / episodes : 0.0; }
  std::optional<double> mean_alignment() const {
    if (alignment_count == 0) return std::nullopt;
    return alignment_sum / alignment_count;
  }
};

/// Per-dominant-axis success rate and mean defined alignment, in axis order.
/// Throws EvaluationError when empty.
std::array<AxisStats, kNumAxes> axis_breakdown(std::span<const ScenarioEpisode> episodes);

struct VarianceRow {
  double alpha = 0.0;
  double empirical_variance = 0.0;
  double formula_variance = 0.0;
  double covariance = 0.0;
};

/// Empirical variance of alpha * turn + (1 - alpha) * batch for each alpha,
/// next to the closed form at the empirical covariance (population statistics).
/// Throws ShapeError on unpaired or empty samples.
std::vector<VarianceRow> variance_diagnostics(std::span<const double> turn_adv,
                                              std::span<const double> batch_adv,
                                              std::span<const double> alpha_grid);

/// Alpha grid point with the smallest empirical variance; first wins on ties.
double variance_minimizer(std::span<const VarianceRow> rows);

struct TurnProfileRow {
  int turn = 0;
  int episodes = 0;
  double mean_return = 0.0;
  double mean_reward = 0.0;
};

/// Mean Monte Carlo return and immediate reward at each turn index, over
/// the episodes long enough to reach it.
std::vector<TurnProfileRow> turn_return_profile(std::span<const EpisodeOutcome> outcomes,
                                                double gamma);

struct EvaluationReport {
  std::array<AxisStats, kNumAxes> axes;
  double success_rate = 0.0;
  std::vector<TurnProfileRow> turn_profile;
  std::vector<ScenarioEpisode> episodes;
};

/// Plays `episodes` fresh scenarios derived from `seed` with sampled actions.
EvaluationReport evaluate_policy(const PolicyParams& policy, const EnvParams& env, int episodes,
                                 std::uint64_t seed, double gamma = 1.0);

}  // namespace mapo
