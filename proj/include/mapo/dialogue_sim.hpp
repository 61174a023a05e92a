// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mapo/empathy_state.hpp"
#include "mapo/env_params.hpp"
#include "mapo/policy.hpp"
#include "mapo/rng.hpp"

namespace mapo {

/// Rule-based stand-in for a simulated user: an initial deficit with one
/// strictly dominant axis.
struct Scenario {
  DeficitState initial_state;
  Axis dominant_axis = Axis::Cognitive;
  std::uint64_t seed = 0;
};

enum class EpisodeStatus { Success, Failure, MaxTurns };

const char* status_name(EpisodeStatus s);
/// Throws DomainError on an unknown name.
EpisodeStatus status_from_name(std::string_view name);

struct TurnRecord {
  int turn_index = 0;
  DeficitState state_before;
  Action action = Action::Probe;
  JudgeDelta delta;
  double reward = 0.0;        // incremental distance reward of this turn
  int regression_streak = 0;  // consecutive negative-reward turns, including this one
};

struct EpisodeOutcome {
  EpisodeStatus status = EpisodeStatus::MaxTurns;
  int turns_used = 0;
  double final_potential = 0.0;
  std::vector<TurnRecord> turn_records;

  std::vector<double> rewards() const;
  double total_reward() const;
  DeficitState initial_state() const { return turn_records.front().state_before; }
  DeficitState final_state() const;
};

/// Incrementally maintains the policy's view of the dialogue. run_episode and
/// the trainer share it so replayed features match the sampled ones exactly.
class HistoryTracker {
 public:
  explicit HistoryTracker(const DeficitState& initial) { summary_.state = initial; }

  const HistorySummary& summary() const { return summary_; }
  /// Prior consecutive uses of `action` immediately before this turn.
  int repeat_count_for(Action action) const;
  void advance(Action action, const DeficitState& next, double reward);

 private:
  HistorySummary summary_;
};

/// Deterministic in the seed. Components in [0.2, 1] * init_max with one
/// uniformly chosen axis strictly largest.
Scenario sample_scenario(std::uint64_t seed, const EnvParams& params);

/// Judge transition: a matched action removes a decayed fraction of the
/// dominant deficit; a mismatched one acts on its own axis and frustrates the
/// dominant one; Probe only draws noise. Always draws three normals.
JudgeDelta judge_step(const DeficitState& state, Action action, int repeat_count,
                      RandomStream& rng, const EnvParams& params);

enum class ActionSelection { Sample, Greedy };

/// Plays one episode to success, failure (fail_streak regressions) or max_turns.
/// At least one turn is always played.
EpisodeOutcome run_episode(const PolicyParams& policy, const Scenario& scenario,
                           std::uint64_t action_seed, const EnvParams& params,
                           ActionSelection selection = ActionSelection::Sample);

/// k episodes of the same scenario with action seeds base_seed + i. With
/// threads > 1 the episodes run concurrently; results are identical either way.
std::vector<EpisodeOutcome> rollout_group(const PolicyParams& policy, const Scenario& scenario,
                                          int k, std::uint64_t base_seed,
                                          const EnvParams& params, int threads = 1);

/// Features the policy saw at each recorded turn, rebuilt from the records.
std::vector<FeatureVector> episode_features(const EpisodeOutcome& episode,
                                            const EnvParams& params);

}  // namespace mapo
