// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mapo/advantage.hpp"
#include "mapo/dialogue_sim.hpp"
#include "mapo/eval_metrics.hpp"
#include "mapo/trainer.hpp"

namespace mapo {

/// An episode plus the identifiers carried in the trajectory log.
struct LoggedEpisode {
  long long episode = 0;
  long long group = 0;
  std::uint64_t scenario_seed = 0;
  EpisodeOutcome outcome;
};

/// Episodes sharing (scenario_seed, group), in first-appearance order.
struct EpisodeGroup {
  std::uint64_t scenario_seed = 0;
  long long group = 0;
  std::vector<LoggedEpisode> episodes;

  std::vector<EpisodeOutcome> outcomes() const;
};

/// `%.<digits>g` formatting.
std::string format_real(double v, int significant_digits = 9);

/// One JSON object per turn, keys: episode, group, scenario_seed, turn,
/// state, action, delta, reward, terminal. Reals carry 9 significant digits.
/// Returns the number of records written; throws IoError on sink failure.
std::size_t write_trajectories(std::span<const LoggedEpisode> episodes, std::ostream& out);

/// Parses and validates a trajectory log. Throws ParseError (with line
/// number) on malformed lines and ValidationError on broken invariants.
std::vector<LoggedEpisode> read_trajectories(std::istream& in);

std::vector<EpisodeGroup> group_episodes(const std::vector<LoggedEpisode>& episodes);

/// Flat `key = value` document with dotted keys; `#` starts a comment.
/// Unknown keys and invalid values throw ConfigError.
TrainConfig parse_run_config(std::istream& in);
void write_run_config(std::ostream& out, const TrainConfig& config);

void write_metrics_csv(std::ostream& out, std::span<const UpdateMetrics> metrics);
void write_evaluation_csv(std::ostream& out, const std::array<AxisStats, kNumAxes>& axes);
void write_turn_profile_csv(std::ostream& out, std::span<const TurnProfileRow> rows);

/// Per-turn advantages of one logged group, in the offline CSV layout.
struct AdvantageRow {
  long long episode = 0;
  int turn = 0;
  double ret = 0.0;
  double turn_adv = 0.0;
  double batch_adv = 0.0;
  double mixed_adv = 0.0;
  bool mask = false;
};

std::vector<AdvantageRow> advantage_rows(const EpisodeGroup& group, const AdvantageConfig& config);
void write_advantages_csv(std::ostream& out, std::span<const AdvantageRow> rows);

}  // namespace mapo
