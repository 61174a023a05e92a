// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "mapo/eval_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "mapo/advantage.hpp"
#include "mapo/errors.hpp"
#include "mapo/rng.hpp"

namespace mapo {

namespace {

constexpr double kZeroNorm = 1e-12;
constexpr std::uint64_t kEvalScenarioStream = 30;
constexpr std::uint64_t kEvalActionStream = 31;

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::optional<double> alignment_score(const DeficitState& deficit_before, const JudgeDelta& delta) {
  const double p_norm = potential(deficit_before);
  const double v_norm = std::hypot(delta.dx(), delta.dy(), delta.dz());
  if (p_norm < kZeroNorm || v_norm < kZeroNorm) return std::nullopt;
  double dot = 0.0;
  for (std::size_t i = 0; i < kNumAxes; ++i) dot += delta[i] * -deficit_before[i];
  return std::clamp(dot / (p_norm * v_norm), -1.0, 1.0);
}

std::vector<AlignmentRecord> alignment_records(const EpisodeOutcome& episode) {
  std::vector<AlignmentRecord> out;
  for (const auto& rec : episode.turn_records) {
    out.push_back({rec.turn_index, rec.state_before, rec.delta,
                   alignment_score(rec.state_before, rec.delta)});
  }
  return out;
}

double success_rate(std::span<const EpisodeOutcome> outcomes) {
  if (outcomes.empty()) throw EvaluationError("success rate of an empty episode set");
  const auto wins = std::count_if(outcomes.begin(), outcomes.end(), [](const EpisodeOutcome& o) {
    return o.status == EpisodeStatus::Success;
  });
  return static_cast<double>(wins) / static_cast<double>(outcomes.size());
}

std::array<AxisStats, kNumAxes> axis_breakdown(std::span<const ScenarioEpisode> episodes) {
  if (episodes.empty()) throw EvaluationError("axis breakdown of an empty episode set");
  std::array<AxisStats, kNumAxes> out;
  for (std::size_t i = 0; i < kNumAxes; ++i) out[i].axis = static_cast<Axis>(i);
  for (const auto& e : episodes) {
    auto& s = out[static_cast<std::size_t>(e.scenario.dominant_axis)];
    ++s.episodes;
    s.successes += e.outcome.status == EpisodeStatus::Success;
    for (const auto& rec : e.outcome.turn_records) {
      if (auto a = alignment_score(rec.state_before, rec.delta)) {
        s.alignment_sum += *a;
        ++s.alignment_count;
      }
    }
  }
  return out;
}

std::vector<VarianceRow> variance_diagnostics(std::span<const double> turn_adv,
                                              std::span<const double> batch_adv,
                                              std::span<const double> alpha_grid) {
  if (turn_adv.size() != batch_adv.size()) throw ShapeError("variance diagnostics: unpaired samples");
  if (turn_adv.empty()) throw ShapeError("variance diagnostics: no samples");
  const double n = static_cast<double>(turn_adv.size());
  const double mx = mean_of(turn_adv), my = mean_of(batch_adv);
  double cov = 0.0;
  for (std::size_t i = 0; i < turn_adv.size(); ++i) cov += (turn_adv[i] - mx) * (batch_adv[i] - my);
  cov /= n;
  // rounding can push the covariance of identical standardized samples past 1
  const double c = std::clamp(cov, -1.0, 1.0);

  std::vector<VarianceRow> rows;
  std::vector<double> z(turn_adv.size());
  for (double alpha : alpha_grid) {
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = alpha * turn_adv[i] + (1.0 - alpha) * batch_adv[i];
    const double mz = mean_of(z);
    double var = 0.0;
    for (double v : z) var += (v - mz) * (v - mz);
    rows.push_back({alpha, var / n, mixture_variance_formula(alpha, c), cov});
  }
  return rows;
}

double variance_minimizer(std::span<const VarianceRow> rows) {
  if (rows.empty()) throw EvaluationError("empty variance table");
  const auto it = std::min_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.empirical_variance < b.empirical_variance;
  });
  return it->alpha;
}

std::vector<TurnProfileRow> turn_return_profile(std::span<const EpisodeOutcome> outcomes,
                                                double gamma) {
  std::vector<TurnProfileRow> rows;
  for (const auto& ep : outcomes) {
    const auto rewards = ep.rewards();
    const auto returns = mc_returns(rewards, gamma);
    if (rows.size() < rewards.size()) rows.resize(rewards.size());
    for (std::size_t t = 0; t < rewards.size(); ++t) {
      rows[t].turn = static_cast<int>(t);
      ++rows[t].episodes;
      rows[t].mean_return += returns[t];
      rows[t].mean_reward += rewards[t];
    }
  }
  for (auto& r : rows) {
    r.mean_return /= r.episodes;
    r.mean_reward /= r.episodes;
  }
  return rows;
}

EvaluationReport evaluate_policy(const PolicyParams& policy, const EnvParams& env, int episodes,
                                 std::uint64_t seed, double gamma) {
  if (episodes < 1) throw EvaluationError("evaluation needs at least one episode");
  env.validate();
  EvaluationReport report;
  std::vector<EpisodeOutcome> outcomes;
  for (int i = 0; i < episodes; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    const auto scenario = sample_scenario(derive_seed(seed, {kEvalScenarioStream, idx}), env);
    auto outcome = run_episode(policy, scenario, derive_seed(seed, {kEvalActionStream, idx}), env);
    outcomes.push_back(outcome);
    report.episodes.push_back({scenario, std::move(outcome)});
  }
  report.axes = axis_breakdown(report.episodes);
  report.success_rate = success_rate(outcomes);
  report.turn_profile = turn_return_profile(outcomes, gamma);
  return report;
}

}  // namespace mapo
