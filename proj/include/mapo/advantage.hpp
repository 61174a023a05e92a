// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mapo {

using Ragged = std::vector<std::vector<double>>;
using RaggedMask = std::vector<std::vector<bool>>;

struct AdvantageConfig {
  double gamma = 1.0;
  double alpha = 0.5;
  double sigma_epsilon = 1e-8;

  double beta() const { return 1.0 - alpha; }
  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

/// Per-turn immediate rewards of one trajectory. Non-empty, all finite.
class RewardTrajectory {
 public:
  explicit RewardTrajectory(std::vector<double> rewards);

  std::size_t length() const { return rewards_.size(); }
  const std::vector<double>& rewards() const { return rewards_; }

 private:
  std::vector<double> rewards_;
};

/// k >= 2 trajectories sampled from one scenario.
class TrajectoryGroup {
 public:
  explicit TrajectoryGroup(std::vector<RewardTrajectory> trajectories);
  static TrajectoryGroup from_rewards(const Ragged& rewards);

  std::size_t size() const { return trajectories_.size(); }
  std::size_t t_min() const { return t_min_; }
  const std::vector<RewardTrajectory>& trajectories() const { return trajectories_; }
  const RewardTrajectory& operator[](std::size_t i) const { return trajectories_[i]; }

 private:
  std::vector<RewardTrajectory> trajectories_;
  std::size_t t_min_ = 0;
};

/// Returns, advantages and loss mask, indexed [trajectory][turn].
struct AdvantageTensor {
  Ragged returns;
  Ragged turn_adv;
  Ragged batch_adv;
  Ragged mixed_adv;
  RaggedMask loss_mask;
  std::size_t t_min = 0;
};

struct TurnAdvantages {
  Ragged advantages;
  RaggedMask mask;
};

/// Discounted suffix sums by one backward pass. Throws ConfigError unless gamma in (0, 1].
std::vector<double> mc_returns(std::span<const double> rewards, double gamma);

/// Minimum trajectory length. Throws GroupError on an empty set.
std::size_t compute_t_min(std::span<const std::size_t> lengths);
std::size_t compute_t_min(const TrajectoryGroup& group);

/// Returns standardized across the group at each turn index below t_min
/// (population std). Turns at or beyond t_min get 0 and mask false. A turn
/// whose std falls below sigma_epsilon gets all-zero advantages, mask true.
TurnAdvantages turn_level_advantages(const Ragged& returns_by_traj, std::size_t t_min,
                                     double sigma_epsilon);

/// Rewards standardized over the whole flattened batch (population std).
std::vector<double> batch_level_advantages(std::span<const double> rewards, double sigma_epsilon);

/// Ragged convenience: statistics span every turn of every trajectory.
Ragged batch_level_advantages(const Ragged& rewards, double sigma_epsilon);

/// alpha * turn + (1 - alpha) * batch where the mask is set, 0 elsewhere.
Ragged mixed_advantages(const Ragged& turn_adv, const Ragged& batch_adv, const RaggedMask& mask,
                        double alpha);

/// 1 - 2 alpha (1 - alpha) (1 - covariance): variance of a convex mixture of
/// two unit-variance variables. Throws DomainError for covariance outside [-1, 1].
double mixture_variance_formula(double alpha, double covariance);

/// Full pipeline for one group: returns, turn/batch/mixed advantages, mask.
AdvantageTensor compute_advantages(const TrajectoryGroup& group, const AdvantageConfig& config);

}  // namespace mapo
