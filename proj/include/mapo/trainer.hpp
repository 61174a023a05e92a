// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mapo/advantage.hpp"
#include "mapo/dialogue_sim.hpp"
#include "mapo/env_params.hpp"
#include "mapo/policy.hpp"

namespace mapo {

/// Advantage estimator used for the policy-gradient weights.
enum class TrainMode { Mapo, TurnOnly, BatchOnly, GrpoOutcome };

inline constexpr TrainMode kAllModes[] = {TrainMode::Mapo, TrainMode::TurnOnly,
                                          TrainMode::BatchOnly, TrainMode::GrpoOutcome};

const char* mode_name(TrainMode mode);
/// Throws ConfigError on an unknown name.
TrainMode mode_from_name(std::string_view name);

struct TrainConfig {
  TrainMode mode = TrainMode::Mapo;
  int group_size = 4;
  int updates = 300;
  int scenarios_per_update = 8;
  double learning_rate = 0.05;
  std::optional<double> grad_clip;  // off by default
  std::uint64_t seed = 0;
  int rollout_threads = 1;
  AdvantageConfig advantage;
  EnvParams env;

  /// Mixture weight actually applied: 1 for turn_only, 0 for batch_only.
  double effective_alpha() const;
  /// Throws ConfigError when any field is out of range.
  void validate() const;
};

struct UpdateMetrics {
  int update_index = 0;
  TrainMode mode = TrainMode::Mapo;
  double alpha = 0.0;
  double mean_group_reward = 0.0;  // mean total reward per episode
  double mean_return_turn0 = 0.0;
  double grad_norm = 0.0;          // before clipping
  double success_fraction = 0.0;

  friend bool operator==(const UpdateMetrics&, const UpdateMetrics&) = default;
};

struct TrainResult {
  std::vector<UpdateMetrics> metrics;
  PolicyParams policy;
};

/// Per-turn advantages applied in the loss, plus which turns enter it.
struct AppliedAdvantages {
  Ragged values;
  RaggedMask mask;
};

/// Scalar outcome used by the outcome baseline: total undiscounted reward,
/// which telescopes to the net potential reduction.
double trajectory_outcome(const EpisodeOutcome& episode);

/// Group-normalized trajectory outcomes (population std); zeros when the
/// std is below sigma_epsilon. Throws GroupError for fewer than 2 outcomes.
std::vector<double> outcome_advantages(std::span<const double> totals, double sigma_epsilon);

/// The outcome baseline: every turn of trajectory i carries advantage i, no masking.
AppliedAdvantages broadcast_outcome_advantages(const std::vector<EpisodeOutcome>& group,
                                               double sigma_epsilon);

/// Advantages for one rollout group under the given mode.
AppliedAdvantages group_advantages(const std::vector<EpisodeOutcome>& group, TrainMode mode,
                                   const AdvantageConfig& config);

/// Gradient of the mean over unmasked turns of A * log p(a | h).
/// Throws ShapeError when advantages do not align with the episodes.
Matrix loss_gradient(const std::vector<EpisodeOutcome>& group, const AppliedAdvantages& adv,
                     const PolicyParams& policy, const EnvParams& env);

struct UpdateStep {
  PolicyParams policy;
  double grad_norm = 0.0;
};

/// Gradient ascent step with optional Frobenius-norm clipping. Reports the
/// pre-clip norm. Throws TrainingError if the gradient or update is non-finite.
UpdateStep apply_update(const PolicyParams& policy, const Matrix& grad, double learning_rate,
                        std::optional<double> grad_clip);

/// Rollout groups of one update, in scenario order.
struct UpdateBatch {
  std::vector<Scenario> scenarios;
  std::vector<std::vector<EpisodeOutcome>> groups;
};

/// Rolls out every scenario of update `update_index` under `policy`.
UpdateBatch collect_update(const TrainConfig& config, const PolicyParams& policy, int update_index);

using UpdateCallback = std::function<void(const UpdateMetrics&, const UpdateBatch&)>;

/// On-policy training loop. Deterministic in the config.
TrainResult train(const TrainConfig& config, const UpdateCallback& on_update = {});

}  // namespace mapo
