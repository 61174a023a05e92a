// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "mapo/trainer.hpp"

#include <cmath>
#include <string>

#include "mapo/errors.hpp"
#include "mapo/rng.hpp"

namespace mapo {

namespace {

constexpr std::uint64_t kScenarioSeedStream = 10;
constexpr std::uint64_t kRolloutSeedStream = 20;

}  // namespace

const char* mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::Mapo: return "mapo";
    case TrainMode::TurnOnly: return "turn_only";
    case TrainMode::BatchOnly: return "batch_only";
    case TrainMode::GrpoOutcome: return "grpo_outcome";
  }
  return "unknown";
}

TrainMode mode_from_name(std::string_view name) {
  for (auto m : kAllModes) {
    if (name == mode_name(m)) return m;
  }
  throw ConfigError("unknown mode '" + std::string(name) +
                    "' (expected mapo, turn_only, batch_only or grpo_outcome)");
}

double TrainConfig::effective_alpha() const {
  switch (mode) {
    case TrainMode::TurnOnly: return 1.0;
    case TrainMode::BatchOnly: return 0.0;
    default: return advantage.alpha;
  }
}

void TrainConfig::validate() const {
  if (group_size < 2) throw ConfigError("group_size must be >= 2");
  if (updates < 1) throw ConfigError("updates must be >= 1");
  if (scenarios_per_update < 1) throw ConfigError("scenarios_per_update must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (grad_clip && !(*grad_clip > 0.0)) throw ConfigError("grad_clip must be positive or none");
  if (rollout_threads < 1) throw ConfigError("rollout_threads must be >= 1");
  advantage.validate();
  env.validate();
}

double trajectory_outcome(const EpisodeOutcome& episode) { return episode.total_reward(); }

std::vector<double> outcome_advantages(std::span<const double> totals, double sigma_epsilon) {
  if (totals.size() < 2) throw GroupError("outcome normalization needs at least 2 trajectories");
  const double n = static_cast<double>(totals.size());
  double mean = 0.0;
  for (double v : totals) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : totals) var += (v - mean) * (v - mean);
  const double sigma = std::sqrt(var / n);
  std::vector<double> out(totals.size(), 0.0);
  if (sigma < sigma_epsilon) return out;
  for (std::size_t i = 0; i < totals.size(); ++i) out[i] = (totals[i] - mean) / sigma;
  return out;
}

AppliedAdvantages broadcast_outcome_advantages(const std::vector<EpisodeOutcome>& group,
                                               double sigma_epsilon) {
  std::vector<double> totals;
  for (const auto& ep : group) totals.push_back(trajectory_outcome(ep));
  const auto adv = outcome_advantages(totals, sigma_epsilon);
  AppliedAdvantages out;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const auto len = group[i].turn_records.size();
    out.values.emplace_back(len, adv[i]);
    out.mask.emplace_back(len, true);
  }
  return out;
}

AppliedAdvantages group_advantages(const std::vector<EpisodeOutcome>& group, TrainMode mode,
                                   const AdvantageConfig& config) {
  if (mode == TrainMode::GrpoOutcome) {
    return broadcast_outcome_advantages(group, config.sigma_epsilon);
  }
  AdvantageConfig cfg = config;
  if (mode == TrainMode::TurnOnly) cfg.alpha = 1.0;
  if (mode == TrainMode::BatchOnly) cfg.alpha = 0.0;

  Ragged rewards;
  for (const auto& ep : group) rewards.push_back(ep.rewards());
  auto tensor = compute_advantages(TrajectoryGroup::from_rewards(rewards), cfg);
  return AppliedAdvantages{std::move(tensor.mixed_adv), std::move(tensor.loss_mask)};
}

Matrix loss_gradient(const std::vector<EpisodeOutcome>& group, const AppliedAdvantages& adv,
                     const PolicyParams& policy, const EnvParams& env) {
  if (adv.values.size() != group.size() || adv.mask.size() != group.size()) {
    throw ShapeError("advantages do not match the number of episodes");
  }
  Matrix grad(policy.num_actions(), policy.feature_dim());
  std::size_t included = 0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const auto& records = group[i].turn_records;
    if (adv.values[i].size() != records.size() || adv.mask[i].size() != records.size()) {
      throw ShapeError("advantages do not match the turn count of episode " + std::to_string(i));
    }
    const auto features = episode_features(group[i], env);
    for (std::size_t t = 0; t < records.size(); ++t) {
      if (!adv.mask[i][t]) continue;
      ++included;
      const double a = adv.values[i][t];
      if (a == 0.0) continue;
      Matrix g = log_prob_grad(policy, features[t], action_index(records[t].action));
      g *= a;
      grad += g;
    }
  }
  if (included > 0) grad *= 1.0 / static_cast<double>(included);
  return grad;
}

UpdateStep apply_update(const PolicyParams& policy, const Matrix& grad, double learning_rate,
                        std::optional<double> grad_clip) {
  if (!grad.all_finite()) throw TrainingError("non-finite policy gradient");
  const double norm = grad.frobenius_norm();
  double scale = learning_rate;
  if (grad_clip && norm > *grad_clip) scale *= *grad_clip / norm;

  Matrix w = policy.weights();
  Matrix step = grad;
  step *= scale;
  w += step;
  if (!w.all_finite()) throw TrainingError("policy update produced non-finite weights");
  return UpdateStep{PolicyParams(std::move(w), policy.temperature()), norm};
}

UpdateBatch collect_update(const TrainConfig& config, const PolicyParams& policy, int update_index) {
  UpdateBatch batch;
  const auto u = static_cast<std::uint64_t>(update_index);
  for (int j = 0; j < config.scenarios_per_update; ++j) {
    const auto s = static_cast<std::uint64_t>(j);
    const auto scenario =
        sample_scenario(derive_seed(config.seed, {kScenarioSeedStream, u, s}), config.env);
    const auto base = derive_seed(config.seed, {kRolloutSeedStream, u, s});
    batch.groups.push_back(rollout_group(policy, scenario, config.group_size, base, config.env,
                                         config.rollout_threads));
    batch.scenarios.push_back(scenario);
  }
  return batch;
}

TrainResult train(const TrainConfig& config, const UpdateCallback& on_update) {
  config.validate();
  TrainResult result;
  PolicyParams policy;
  const double alpha = config.effective_alpha();

  for (int u = 0; u < config.updates; ++u) {
    const auto batch = collect_update(config, policy, u);

    Matrix grad(policy.num_actions(), policy.feature_dim());
    double reward_sum = 0.0, return_sum = 0.0;
    int episodes = 0, successes = 0;
    for (const auto& group : batch.groups) {
      const auto adv = group_advantages(group, config.mode, config.advantage);
      grad += loss_gradient(group, adv, policy, config.env);
      for (const auto& ep : group) {
        reward_sum += ep.total_reward();
        return_sum += mc_returns(ep.rewards(), config.advantage.gamma).front();
        successes += ep.status == EpisodeStatus::Success;
        ++episodes;
      }
    }
    grad *= 1.0 / static_cast<double>(batch.groups.size());

    auto step = apply_update(policy, grad, config.learning_rate, config.grad_clip);
    policy = std::move(step.policy);

    UpdateMetrics m;
    m.update_index = u;
    m.mode = config.mode;
    m.alpha = alpha;
    m.mean_group_reward = reward_sum / episodes;
    m.mean_return_turn0 = return_sum / episodes;
    m.grad_norm = step.grad_norm;
    m.success_fraction = static_cast<double>(successes) / episodes;
    result.metrics.push_back(m);
    if (on_update) on_update(m, batch);
  }
  result.policy = std::move(policy);
  return result;
}

}  // namespace mapo
