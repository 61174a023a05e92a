// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when a blocking criterion fails. Optional argv[1] names a
// directory for the metrics and turn profile CSVs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "mapo/advantage.hpp"
#include "mapo/dialogue_sim.hpp"
#include "mapo/eval_metrics.hpp"
#include "mapo/io.hpp"
#include "mapo/policy.hpp"
#include "mapo/rng.hpp"
#include "mapo/trainer.hpp"

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kSeeds = 5;
constexpr double kStatTol = 1e-9;

struct Verdict {
  bool pass = true;
  std::string detail;
};

int g_blocking_failures = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int id, const char* name, const Verdict& v, double secs, double limit,
            bool blocking = true) {
  const bool in_time = secs < limit;
  const bool ok = v.pass && in_time;
  const char* tag = ok ? "PASS" : (blocking ? "FAIL" : "INFO");
  std::printf("[%s] %2d %-26s %s (%.2f s, limit %.0f s)\n", tag, id, name, v.detail.c_str(),
              secs, limit);
  if (!ok && blocking) ++g_blocking_failures;
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<mapo::Ragged> seeded_groups(std::uint64_t seed, int count, std::size_t lo,
                                        std::size_t hi) {
  std::mt19937_64 gen(seed);
  std::vector<mapo::Ragged> out;
  for (int i = 0; i < count; ++i) out.push_back(oracle::random_group(gen, 4, lo, hi));
  return out;
}

void moments(const std::vector<double>& v, double& mean, double& sd) {
  long double m = 0;
  for (double x : v) m += x;
  m /= v.size();
  long double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  mean = static_cast<double>(m);
  sd = std::sqrt(static_cast<double>(ss / v.size()));
}

// Criterion 1 and 2 share the same 100 groups.
Verdict normalization(const std::vector<mapo::Ragged>& groups) {
  const mapo::AdvantageConfig cfg;
  double worst_mean = 0, worst_sd = 0;
  for (const auto& rewards : groups) {
    const auto a = mapo::compute_advantages(mapo::TrajectoryGroup::from_rewards(rewards), cfg);
    for (std::size_t t = 0; t < a.t_min; ++t) {
      std::vector<double> col;
      for (const auto& row : a.turn_adv) col.push_back(row[t]);
      double m, sd;
      moments(col, m, sd);
      worst_mean = std::max(worst_mean, std::abs(m));
      worst_sd = std::max(worst_sd, std::abs(sd - 1.0));
    }
    std::vector<double> flat;
    for (const auto& row : a.batch_adv) flat.insert(flat.end(), row.begin(), row.end());
    double m, sd;
    moments(flat, m, sd);
    worst_mean = std::max(worst_mean, std::abs(m));
    worst_sd = std::max(worst_sd, std::abs(sd - 1.0));
  }
  Verdict v;
  v.pass = worst_mean < kStatTol && worst_sd < kStatTol;
  v.detail = fmt("max|mean|=%.2e", worst_mean) + fmt(" max|std-1|=%.2e", worst_sd);
  return v;
}

Verdict samuelson(const std::vector<mapo::Ragged>& groups) {
  const mapo::AdvantageConfig cfg;
  double turn_slack = -1e300, batch_slack = -1e300;
  for (const auto& rewards : groups) {
    const auto a = mapo::compute_advantages(mapo::TrajectoryGroup::from_rewards(rewards), cfg);
    std::size_t n = 0;
    double bmax = 0, tmax = 0;
    for (std::size_t i = 0; i < a.batch_adv.size(); ++i) {
      n += a.batch_adv[i].size();
      for (std::size_t t = 0; t < a.batch_adv[i].size(); ++t) {
        bmax = std::max(bmax, std::abs(a.batch_adv[i][t]));
        if (a.loss_mask[i][t]) tmax = std::max(tmax, std::abs(a.turn_adv[i][t]));
      }
    }
    turn_slack = std::max(turn_slack, tmax - std::sqrt(3.0));
    batch_slack = std::max(batch_slack, bmax - std::sqrt(static_cast<double>(n - 1)));
  }
  Verdict v;
  v.pass = turn_slack <= kStatTol && batch_slack <= kStatTol;
  v.detail = fmt("max|A_turn|-sqrt3=%.2e", turn_slack) +
             fmt(" max|A_batch|-sqrt(n-1)=%.3f", batch_slack);
  return v;
}

std::vector<double> restandardize(std::vector<double> v) {
  double m, sd;
  moments(v, m, sd);
  for (double& x : v) x = (x - m) / sd;
  return v;
}

Verdict mixture_variance_check() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i * 0.05);

  // Paired standardized samples spanning the covariance range, plus the
  // pooled unmasked turn/batch advantages of simulated-like reward groups.
  std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  for (double rho : {-1.0, -0.7, -0.2, 0.0, 0.3, 0.8, 0.999, 1.0}) {
    std::vector<double> x(400), y(400);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = nd(gen);
      y[i] = rho * x[i] + std::sqrt(std::max(0.0, 1 - rho * rho)) * nd(gen);
    }
    x = restandardize(x);
    y = rho == 1.0 ? x : (rho == -1.0 ? std::vector<double>(x) : restandardize(y));
    if (rho == -1.0)
      for (double& e : y) e = -e;
    pairs.emplace_back(x, y);
  }
  {
    std::vector<double> tu, ba;
    for (const auto& rewards : seeded_groups(99, 50, 3, 15)) {
      const auto a =
          mapo::compute_advantages(mapo::TrajectoryGroup::from_rewards(rewards), {});
      for (std::size_t i = 0; i < a.turn_adv.size(); ++i)
        for (std::size_t t = 0; t < a.t_min; ++t) {
          tu.push_back(a.turn_adv[i][t]);
          ba.push_back(a.batch_adv[i][t]);
        }
    }
    pairs.emplace_back(restandardize(tu), restandardize(ba));
  }

  double worst_gap = 0, worst_var = 0;
  int minimizer_checks = 0, minimizer_ok = 0;
  for (const auto& [x, y] : pairs) {
    const auto rows = mapo::variance_diagnostics(x, y, grid);
    for (const auto& r : rows) {
      worst_gap = std::max(worst_gap, std::abs(r.empirical_variance - r.formula_variance));
      worst_var = std::max(worst_var, r.empirical_variance);
    }
    if (rows.front().covariance < 1 - 1e-6) {
      ++minimizer_checks;
      if (std::abs(mapo::variance_minimizer(rows) - 0.5) < 1e-12) ++minimizer_ok;
    }
  }
  Verdict v;
  v.pass = worst_gap < kStatTol && worst_var <= 1 + kStatTol && minimizer_ok == minimizer_checks;
  v.detail = fmt("max|emp-formula|=%.2e", worst_gap) + fmt(" max var=%.12f", worst_var) +
             " argmin=0.5 in " + std::to_string(minimizer_ok) + "/" +
             std::to_string(minimizer_checks);
  return v;
}

mapo::PolicyParams random_policy(std::mt19937_64& gen, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  mapo::Matrix w(mapo::kNumActions, mapo::kFeatureDim);
  for (double& x : w.data()) x = nd(gen);
  return mapo::PolicyParams(std::move(w));
}

Verdict telescoping() {
  const mapo::EnvParams env;
  std::mt19937_64 gen(11);
  double worst_idr = 0, worst_outcome = 0;
  int episodes = 0;
  for (int s = 0; s < 250; ++s) {
    const auto policy = s % 2 ? random_policy(gen, 1.0) : mapo::PolicyParams();
    const auto scenario = mapo::sample_scenario(mapo::derive_seed(11, {1, std::uint64_t(s)}), env);
    const auto group = mapo::rollout_group(policy, scenario, 4, mapo::derive_seed(11, {2, std::uint64_t(s)}), env);
    for (const auto& ep : group) {
      ++episodes;
      const double net = mapo::potential(ep.initial_state()) - mapo::potential(ep.final_state());
      double idr = 0;
      for (const auto& r : ep.turn_records) idr += r.reward;
      worst_idr = std::max(worst_idr, std::abs(idr - net));
      worst_outcome = std::max(worst_outcome, std::abs(mapo::trajectory_outcome(ep) - net));
    }
  }
  Verdict v;
  v.pass = worst_idr < kStatTol && worst_outcome < kStatTol;
  v.detail = std::to_string(episodes) + " episodes" + fmt(" max|sum IDR-dphi|=%.2e", worst_idr) +
             fmt(" max|outcome-dphi|=%.2e", worst_outcome);
  return v;
}

// Max abs component error relative to the largest finite-difference component.
double relative_error(const std::vector<double>& fd, std::span<const double> an) {
  double diff = 0, scale = 1e-8;
  for (std::size_t i = 0; i < fd.size(); ++i) {
    diff = std::max(diff, std::abs(fd[i] - an[i]));
    scale = std::max(scale, std::abs(fd[i]));
  }
  return diff / scale;
}

Verdict gradients() {
  constexpr double h = 1e-5;
  const std::size_t rows = mapo::kNumActions, cols = mapo::kFeatureDim;
  const mapo::EnvParams env;
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd;
  double worst_single = 0, worst_batch = 0;

  for (int c = 0; c < 50; ++c) {
    const double temp = c % 5 == 0 ? 0.7 : 1.0;
    const auto theta = random_policy(gen, 1.0);
    const mapo::PolicyParams tp(theta.weights(), temp);
    std::vector<double> f(cols);
    for (double& x : f) x = nd(gen);
    const std::size_t a = gen() % rows;
    const auto an = mapo::log_prob_grad(tp, f, a);
    const std::vector<double> w(theta.weights().data().begin(), theta.weights().data().end());
    std::vector<double> fd(w.size());
    for (std::size_t k = 0; k < w.size(); ++k)
      fd[k] = oracle::central_difference(
          [&](const std::vector<double>& x) { return oracle::log_softmax(x, rows, cols, f, temp, a); },
          w, k, h);
    worst_single = std::max(worst_single, relative_error(fd, an.data()));
  }

  for (int b = 0; b < 10; ++b) {
    const auto theta = random_policy(gen, 0.5);
    const auto scenario = mapo::sample_scenario(gen(), env);
    const auto group = mapo::rollout_group(theta, scenario, 4, gen(), env);
    const auto mode = mapo::kAllModes[b % 4];
    const auto adv = mapo::group_advantages(group, mode, {});
    const auto an = mapo::loss_gradient(group, adv, theta, env);

    std::vector<std::vector<mapo::FeatureVector>> feats;
    for (const auto& ep : group) feats.push_back(mapo::episode_features(ep, env));
    const auto surrogate = [&](const std::vector<double>& w) {
      double sum = 0;
      std::size_t included = 0;
      for (std::size_t i = 0; i < group.size(); ++i)
        for (std::size_t t = 0; t < group[i].turn_records.size(); ++t) {
          if (!adv.mask[i][t]) continue;
          ++included;
          const std::vector<double> f(feats[i][t].begin(), feats[i][t].end());
          sum += adv.values[i][t] *
                 oracle::log_softmax(w, rows, cols, f, 1.0,
                                     mapo::action_index(group[i].turn_records[t].action));
        }
      return included ? sum / static_cast<double>(included) : 0.0;
    };
    const std::vector<double> w(theta.weights().data().begin(), theta.weights().data().end());
    std::vector<double> fd(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) fd[k] = oracle::central_difference(surrogate, w, k, h);
    worst_batch = std::max(worst_batch, relative_error(fd, an.data()));
  }
  Verdict v;
  v.pass = worst_single < 1e-4 && worst_batch < 1e-4;
  v.detail = fmt("log-prob rel err=%.2e", worst_single) + fmt(" surrogate rel err=%.2e", worst_batch);
  return v;
}

Verdict oracle_equivalence() {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> ug(0.5, 1.0), ua(0.0, 1.0);
  double worst = 0;
  const auto track = [&](const mapo::Ragged& x, const oracle::Ragged& y) {
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t t = 0; t < x[i].size(); ++t) worst = std::max(worst, std::abs(x[i][t] - y[i][t]));
  };
  for (int g = 0; g < 50; ++g) {
    const std::size_t k = 2 + gen() % 6;
    const auto rewards = oracle::random_group(gen, k, 1, 15);
    mapo::AdvantageConfig cfg;
    cfg.gamma = g % 3 == 0 ? 1.0 : ug(gen);
    cfg.alpha = ua(gen);
    const auto a = mapo::compute_advantages(mapo::TrajectoryGroup::from_rewards(rewards), cfg);
    oracle::Ragged ret;
    for (const auto& r : rewards) ret.push_back(oracle::returns(r, cfg.gamma));
    const std::size_t t_min = oracle::shortest(rewards);
    const auto tu = oracle::turn_advantages(ret, t_min);
    const auto ba = oracle::batch_advantages(rewards);
    if (a.t_min != t_min) worst = 1e300;
    track(a.returns, ret);
    track(a.turn_adv, tu);
    track(a.batch_adv, ba);
    track(a.mixed_adv, oracle::mixture(tu, ba, t_min, cfg.alpha));
  }
  Verdict v;
  v.pass = worst <= 1e-12;
  v.detail = fmt("max abs diff=%.2e", worst);
  return v;
}

struct Run {
  std::vector<mapo::UpdateMetrics> metrics;
  std::string csv;
  double final20 = 0;
  double max_grad = 0;
};

Run run_mode(mapo::TrainMode mode, std::uint64_t seed) {
  mapo::TrainConfig cfg;
  cfg.mode = mode;
  cfg.seed = seed;
  Run run;
  run.metrics = mapo::train(cfg).metrics;
  std::ostringstream os;
  mapo::write_metrics_csv(os, run.metrics);
  run.csv = os.str();
  const std::size_t n = run.metrics.size();
  for (std::size_t i = n - 20; i < n; ++i) run.final20 += run.metrics[i].mean_group_reward / 20.0;
  for (const auto& m : run.metrics) run.max_grad = std::max(run.max_grad, m.grad_norm);
  return run;
}

using RunTable = std::map<std::pair<int, std::uint64_t>, Run>;

RunTable all_runs() {
  RunTable runs;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed)
    for (auto mode : mapo::kAllModes) runs[{static_cast<int>(mode), seed}] = run_mode(mode, seed);
  return runs;
}

const Run& at(const RunTable& t, mapo::TrainMode m, std::uint64_t s) {
  return t.at({static_cast<int>(m), s});
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

Verdict directional(const RunTable& runs) {
  using mapo::TrainMode;
  std::vector<double> mapo_f, grpo_f;
  int beats = 0;
  std::string per_seed;
  for (std::uint64_t s = 0; s < kSeeds; ++s) {
    const double m = at(runs, TrainMode::Mapo, s).final20;
    const double t = at(runs, TrainMode::TurnOnly, s).final20;
    const double b = at(runs, TrainMode::BatchOnly, s).final20;
    mapo_f.push_back(m);
    grpo_f.push_back(at(runs, TrainMode::GrpoOutcome, s).final20);
    if (m >= std::max(t, b)) ++beats;
  }
  const double mm = median(mapo_f), gm = median(grpo_f);
  std::vector<double> tf, bf;
  for (std::uint64_t s = 0; s < kSeeds; ++s) {
    tf.push_back(at(runs, TrainMode::TurnOnly, s).final20);
    bf.push_back(at(runs, TrainMode::BatchOnly, s).final20);
  }
  Verdict v;
  const bool median_ok = mm > gm;
  const bool seeds_ok = beats >= 3;
  v.pass = median_ok && seeds_ok;
  v.detail = fmt("median final-20 reward: mapo=%.4f", mm) + fmt(" grpo_outcome=%.4f", gm) +
             fmt(" turn_only=%.4f", median(tf)) + fmt(" batch_only=%.4f", median(bf)) +
             (median_ok ? " [mapo>grpo ok]" : " [mapo>grpo FAILED]") +
             "; mapo>=max(turn,batch) in " + std::to_string(beats) + "/5 seeds" +
             (seeds_ok ? " [ok]" : " [needs 3, FAILED]");
  return v;
}

Verdict stability(const RunTable& runs) {
  int wins = 0;
  std::string per_seed;
  for (std::uint64_t s = 0; s < kSeeds; ++s) {
    const double b = at(runs, mapo::TrainMode::BatchOnly, s).max_grad;
    const double m = at(runs, mapo::TrainMode::Mapo, s).max_grad;
    if (b > m) ++wins;
    per_seed += fmt(" %.3f", b) + fmt("/%.3f", m);
  }
  Verdict v;
  v.pass = wins >= 3;
  v.detail = "batch_only max grad_norm > mapo in " + std::to_string(wins) +
             "/5 seeds (batch/mapo:" + per_seed + ")";
  return v;
}

Verdict turn_profile(const std::filesystem::path& out_dir) {
  mapo::TrainConfig cfg;
  cfg.updates = 150;
  const auto trained = mapo::train(cfg);
  const auto report = mapo::evaluate_policy(trained.policy, cfg.env, 500, 77, cfg.advantage.gamma);
  double lo = 1e300, hi = -1e300;
  for (const auto& row : report.turn_profile) {
    if (row.episodes < 20) continue;
    lo = std::min(lo, row.mean_return);
    hi = std::max(hi, row.mean_return);
  }
  if (!out_dir.empty()) {
    std::ofstream os(out_dir / "turn_profile.csv");
    mapo::write_turn_profile_csv(os, report.turn_profile);
  }
  Verdict v;
  v.pass = hi - lo > 0.1;
  v.detail = fmt("per-turn mean return range=%.4f", hi - lo) + fmt(" (%.4f", lo) +
             fmt("..%.4f, turns with >=20 episodes)", hi);
  return v;
}

Verdict determinism(const RunTable& first) {
  const auto second = all_runs();
  int identical = 0;
  for (const auto& [key, run] : first)
    if (second.at(key).csv == run.csv) ++identical;
  Verdict v;
  v.pass = identical == static_cast<int>(first.size());
  v.detail = std::to_string(identical) + "/" + std::to_string(first.size()) +
             " metrics CSVs byte-identical on rerun";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path out_dir;
  if (argc > 1) {
    out_dir = argv[1];
    std::filesystem::create_directories(out_dir);
  }

  const auto groups = seeded_groups(1, 100, 3, 15);

  auto t0 = Clock::now();
  auto v = normalization(groups);
  report(1, "normalization invariants", v, seconds_since(t0), 5);

  t0 = Clock::now();
  v = samuelson(groups);
  report(2, "Samuelson bounds", v, seconds_since(t0), 5);

  t0 = Clock::now();
  v = mixture_variance_check();
  report(3, "mixture variance", v, seconds_since(t0), 5);

  t0 = Clock::now();
  v = telescoping();
  report(4, "shaping telescoping", v, seconds_since(t0), 5);

  t0 = Clock::now();
  v = gradients();
  report(5, "gradient correctness", v, seconds_since(t0), 10);

  t0 = Clock::now();
  v = oracle_equivalence();
  report(6, "oracle equivalence", v, seconds_since(t0), 5);

  t0 = Clock::now();
  const auto runs = all_runs();
  const double train_secs = seconds_since(t0);
  if (!out_dir.empty()) {
    for (const auto& [key, run] : runs) {
      std::ofstream os(out_dir / ("metrics_" +
                                  std::string(mapo::mode_name(static_cast<mapo::TrainMode>(key.first))) +
                                  "_seed" + std::to_string(key.second) + ".csv"));
      os << run.csv;
    }
  }
  report(7, "directional training", directional(runs), train_secs, 300);
  report(8, "gradient norm stability", stability(runs), train_secs, 300);

  t0 = Clock::now();
  v = turn_profile(out_dir);
  report(9, "turn profile (diagnostic)", v, seconds_since(t0), 300, /*blocking=*/false);

  t0 = Clock::now();
  v = determinism(runs);
  report(10, "determinism", v, seconds_since(t0), 300);

  std::printf("%d blocking criterion(s) failed\n", g_blocking_failures);
  return g_blocking_failures == 0 ? 0 : 1;
}
