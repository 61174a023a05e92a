// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "mapo/dialogue_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "mapo/errors.hpp"

namespace mapo {

namespace {

constexpr double kDeltaClip = 1.99;
constexpr std::uint64_t kActionStream = 1;
constexpr std::uint64_t kJudgeStream = 2;
constexpr std::uint64_t kScenarioStream = 3;

}  // namespace

void EnvParams::validate() const {
  if (!(effectiveness > 0.0 && effectiveness < 1.0)) throw ConfigError("env.effectiveness must lie in (0, 1)");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw ConfigError("env.noise_std must be >= 0");
  if (!(frustration >= 0.0) || !std::isfinite(frustration)) throw ConfigError("env.frustration must be >= 0");
  if (!(repeat_decay > 0.0 && repeat_decay <= 1.0)) throw ConfigError("env.repeat_decay must lie in (0, 1]");
  if (!(success_epsilon > 0.0) || !std::isfinite(success_epsilon)) throw ConfigError("env.success_epsilon must be positive");
  if (fail_streak < 1) throw ConfigError("env.fail_streak must be >= 1");
  if (max_turns < 1) throw ConfigError("env.max_turns must be >= 1");
  if (!(init_max > 0.0) || !std::isfinite(init_max)) throw ConfigError("env.init_max must be positive");
}

const char* status_name(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::Success: return "success";
    case EpisodeStatus::Failure: return "failure";
    case EpisodeStatus::MaxTurns: return "max_turns";
  }
  return "unknown";
}

EpisodeStatus status_from_name(std::string_view name) {
  if (name == "success") return EpisodeStatus::Success;
  if (name == "failure") return EpisodeStatus::Failure;
  if (name == "max_turns") return EpisodeStatus::MaxTurns;
  throw DomainError("unknown episode status '" + std::string(name) + "'");
}

std::vector<double> EpisodeOutcome::rewards() const {
  std::vector<double> r;
  r.reserve(turn_records.size());
  for (const auto& rec : turn_records) r.push_back(rec.reward);
  return r;
}

double EpisodeOutcome::total_reward() const {
  double s = 0.0;
  for (const auto& rec : turn_records) s += rec.reward;
  return s;
}

DeficitState EpisodeOutcome::final_state() const {
  const auto& last = turn_records.back();
  return apply_delta(last.state_before, last.delta);
}

int HistoryTracker::repeat_count_for(Action action) const {
  return summary_.last_action == action ? summary_.repeat_count : 0;
}

void HistoryTracker::advance(Action action, const DeficitState& next, double reward) {
  summary_.repeat_count = summary_.last_action == action ? summary_.repeat_count + 1 : 1;
  summary_.last_action = action;
  summary_.regression_streak = reward < 0.0 ? summary_.regression_streak + 1 : 0;
  summary_.turn_index += 1;
  summary_.state = next;
}

Scenario sample_scenario(std::uint64_t seed, const EnvParams& params) {
  RandomStream rng(derive_seed(seed, {kScenarioStream}));
  const double m = params.init_max;
  const auto dominant = static_cast<std::size_t>(rng.next_u64() % kNumAxes);
  const double top = m * (0.6 + 0.4 * rng.uniform());
  std::array<double, 3> v{};
  for (std::size_t i = 0; i < kNumAxes; ++i) {
    // others stay in [0.2 m, 0.9 top], strictly below the dominant component
    v[i] = i == dominant ? top : 0.2 * m + (0.9 * top - 0.2 * m) * rng.uniform();
  }
  return Scenario{DeficitState(v[0], v[1], v[2]), static_cast<Axis>(dominant), seed};
}

JudgeDelta judge_step(const DeficitState& state, Action action, int repeat_count,
                      RandomStream& rng, const EnvParams& params) {
  std::array<double, 3> d{};
  for (double& c : d) c = params.noise_std * rng.normal();

  if (action != Action::Probe) {
    const auto target = action_index(action);
    const auto dominant = static_cast<std::size_t>(dominant_axis(state));
    const double strength = params.effectiveness * std::pow(params.repeat_decay, repeat_count);
    d[target] -= strength * state[target];
    if (target != dominant) {
      // frustration grows the dominant deficit's magnitude
      d[dominant] += state[dominant] < 0.0 ? -params.frustration : params.frustration;
    }
  }
  for (double& c : d) c = std::clamp(c, -kDeltaClip, kDeltaClip);
  return JudgeDelta(d[0], d[1], d[2]);
}

EpisodeOutcome run_episode(const PolicyParams& policy, const Scenario& scenario,
                           std::uint64_t action_seed, const EnvParams& params,
                           ActionSelection selection) {
  RandomStream action_rng(derive_seed(action_seed, {kActionStream}));
  RandomStream judge_rng(derive_seed(action_seed, {kJudgeStream, scenario.seed}));

  EpisodeOutcome out;
  HistoryTracker tracker(scenario.initial_state);
  out.status = EpisodeStatus::MaxTurns;
  for (int turn = 0; turn < params.max_turns; ++turn) {
    const HistorySummary& h = tracker.summary();
    const auto features = featurize(h, params);
    const auto dist = action_probs(policy, features);
    const Action action = static_cast<Action>(
        selection == ActionSelection::Greedy ? greedy_action(dist) : sample_action(dist, action_rng));

    const JudgeDelta delta =
        judge_step(h.state, action, tracker.repeat_count_for(action), judge_rng, params);
    const DeficitState next = apply_delta(h.state, delta);
    const double reward = incremental_reward(h.state, next);

    TurnRecord rec{turn, h.state, action, delta, reward, 0};
    tracker.advance(action, next, reward);
    rec.regression_streak = tracker.summary().regression_streak;
    out.turn_records.push_back(rec);

    if (potential(next) <= params.success_epsilon) {
      out.status = EpisodeStatus::Success;
      break;
    }
    if (rec.regression_streak >= params.fail_streak) {
      out.status = EpisodeStatus::Failure;
      break;
    }
  }
  out.turns_used = static_cast<int>(out.turn_records.size());
  out.final_potential = potential(tracker.summary().state);
  return out;
}

std::vector<EpisodeOutcome> rollout_group(const PolicyParams& policy, const Scenario& scenario,
                                          int k, std::uint64_t base_seed,
                                          const EnvParams& params, int threads) {
  if (k < 2) throw GroupError("rollout group needs k >= 2");
  std::vector<EpisodeOutcome> out(static_cast<std::size_t>(k));
  auto work = [&](int begin, int stride) {
    for (int i = begin; i < k; i += stride) {
      out[static_cast<std::size_t>(i)] =
          run_episode(policy, scenario, base_seed + static_cast<std::uint64_t>(i), params);
    }
  };
  const int n = std::clamp(threads, 1, k);
  if (n == 1) {
    work(0, 1);
    return out;
  }
  std::vector<std::jthread> pool;
  for (int t = 0; t < n; ++t) pool.emplace_back(work, t, n);
  pool.clear();
  return out;
}

std::vector<FeatureVector> episode_features(const EpisodeOutcome& episode,
                                            const EnvParams& params) {
  std::vector<FeatureVector> out;
  if (episode.turn_records.empty()) return out;
  HistoryTracker tracker(episode.turn_records.front().state_before);
  for (const auto& rec : episode.turn_records) {
    out.push_back(featurize(tracker.summary(), params));
    tracker.advance(rec.action, apply_delta(rec.state_before, rec.delta), rec.reward);
  }
  return out;
}

}  // namespace mapo
