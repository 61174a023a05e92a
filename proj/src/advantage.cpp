// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "mapo/advantage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mapo/errors.hpp"

namespace mapo {

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
}

void check_same_shape(const Ragged& a, const Ragged& b, const char* what) {
  bool ok = a.size() == b.size();
  for (std::size_t i = 0; ok && i < a.size(); ++i) ok = a[i].size() == b[i].size();
  if (!ok) throw ShapeError(std::string(what) + ": shape mismatch");
}

}  // namespace

void AdvantageConfig::validate() const {
  check_gamma(gamma);
  check_alpha(alpha);
  if (!(sigma_epsilon > 0.0) || !std::isfinite(sigma_epsilon)) {
    throw ConfigError("sigma_epsilon must be positive");
  }
}

RewardTrajectory::RewardTrajectory(std::vector<double> rewards) : rewards_(std::move(rewards)) {
  if (rewards_.empty()) throw GroupError("trajectory must contain at least one turn");
  for (double r : rewards_) {
    if (!std::isfinite(r)) throw GroupError("trajectory has a non-finite reward");
  }
}

TrajectoryGroup::TrajectoryGroup(std::vector<RewardTrajectory> trajectories)
    : trajectories_(std::move(trajectories)) {
  if (trajectories_.size() < 2) throw GroupError("a group needs at least 2 trajectories");
  t_min_ = compute_t_min(*this);
}

TrajectoryGroup TrajectoryGroup::from_rewards(const Ragged& rewards) {
  std::vector<RewardTrajectory> trajs;
  trajs.reserve(rewards.size());
  for (const auto& r : rewards) trajs.emplace_back(r);
  return TrajectoryGroup(std::move(trajs));
}

std::vector<double> mc_returns(std::span<const double> rewards, double gamma) {
  check_gamma(gamma);
  std::vector<double> out(rewards.size());
  double acc = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    acc = rewards[t] + gamma * acc;
    out[t] = acc;
  }
  return out;
}

std::size_t compute_t_min(std::span<const std::size_t> lengths) {
  if (lengths.empty()) throw GroupError("cannot take t_min of an empty group");
  return *std::min_element(lengths.begin(), lengths.end());
}

std::size_t compute_t_min(const TrajectoryGroup& group) {
  std::vector<std::size_t> lengths;
  for (const auto& t : group.trajectories()) lengths.push_back(t.length());
  return compute_t_min(lengths);
}

TurnAdvantages turn_level_advantages(const Ragged& returns_by_traj, std::size_t t_min,
                                     double sigma_epsilon) {
  const std::size_t k = returns_by_traj.size();
  if (k < 2) throw GroupError("turn-level normalization needs at least 2 trajectories");
  for (const auto& r : returns_by_traj) {
    if (r.size() < t_min) throw ShapeError("t_min exceeds a trajectory length");
  }

  TurnAdvantages out;
  out.advantages.resize(k);
  out.mask.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t len = returns_by_traj[i].size();
    out.advantages[i].assign(len, 0.0);
    out.mask[i].assign(len, false);
    std::fill_n(out.mask[i].begin(), t_min, true);
  }

  const double kd = static_cast<double>(k);
  for (std::size_t t = 0; t < t_min; ++t) {
    double mean = 0.0;
    for (const auto& r : returns_by_traj) mean += r[t];
    mean /= kd;
    double var = 0.0;
    for (const auto& r : returns_by_traj) var += (r[t] - mean) * (r[t] - mean);
    const double sigma = std::sqrt(var / kd);
    if (sigma < sigma_epsilon) continue;
    for (std::size_t i = 0; i < k; ++i) {
      out.advantages[i][t] = (returns_by_traj[i][t] - mean) / sigma;
    }
  }
  return out;
}

std::vector<double> batch_level_advantages(std::span<const double> rewards, double sigma_epsilon) {
  const std::size_t n = rewards.size();
  if (n < 2) throw BatchError("batch normalization needs at least 2 samples");
  const double nd = static_cast<double>(n);
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= nd;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sigma = std::sqrt(var / nd);

  std::vector<double> out(n, 0.0);
  if (sigma < sigma_epsilon) return out;
  for (std::size_t j = 0; j < n; ++j) out[j] = (rewards[j] - mean) / sigma;
  return out;
}

Ragged batch_level_advantages(const Ragged& rewards, double sigma_epsilon) {
  std::vector<double> flat;
  for (const auto& r : rewards) flat.insert(flat.end(), r.begin(), r.end());
  const auto adv = batch_level_advantages(flat, sigma_epsilon);

  Ragged out(rewards.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out[i].assign(adv.begin() + static_cast<std::ptrdiff_t>(j),
                  adv.begin() + static_cast<std::ptrdiff_t>(j + rewards[i].size()));
    j += rewards[i].size();
  }
  return out;
}

Ragged mixed_advantages(const Ragged& turn_adv, const Ragged& batch_adv, const RaggedMask& mask,
                        double alpha) {
  check_alpha(alpha);
  check_same_shape(turn_adv, batch_adv, "mixed_advantages");
  bool ok = mask.size() == turn_adv.size();
  for (std::size_t i = 0; ok && i < mask.size(); ++i) ok = mask[i].size() == turn_adv[i].size();
  if (!ok) throw ShapeError("mixed_advantages: mask shape mismatch");

  const double beta = 1.0 - alpha;
  Ragged out(turn_adv.size());
  for (std::size_t i = 0; i < turn_adv.size(); ++i) {
    out[i].assign(turn_adv[i].size(), 0.0);
    for (std::size_t t = 0; t < turn_adv[i].size(); ++t) {
      if (mask[i][t]) out[i][t] = alpha * turn_adv[i][t] + beta * batch_adv[i][t];
    }
  }
  return out;
}

double mixture_variance_formula(double alpha, double covariance) {
  if (!(covariance >= -1.0 && covariance <= 1.0)) {
    throw DomainError("covariance of unit-variance variables must lie in [-1, 1]");
  }
  return 1.0 - 2.0 * alpha * (1.0 - alpha) * (1.0 - covariance);
}

AdvantageTensor compute_advantages(const TrajectoryGroup& group, const AdvantageConfig& config) {
  config.validate();
  AdvantageTensor out;
  out.t_min = group.t_min();

  Ragged rewards;
  rewards.reserve(group.size());
  for (const auto& traj : group.trajectories()) {
    rewards.push_back(traj.rewards());
    out.returns.push_back(mc_returns(traj.rewards(), config.gamma));
  }

  auto turn = turn_level_advantages(out.returns, out.t_min, config.sigma_epsilon);
  out.turn_adv = std::move(turn.advantages);
  out.loss_mask = std::move(turn.mask);
  out.batch_adv = batch_level_advantages(rewards, config.sigma_epsilon);
  out.mixed_adv = mixed_advantages(out.turn_adv, out.batch_adv, out.loss_mask, config.alpha);
  return out;
}

}  // namespace mapo
