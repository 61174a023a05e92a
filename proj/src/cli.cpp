// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "mapo/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mapo/errors.hpp"
#include "mapo/eval_metrics.hpp"
#include "mapo/io.hpp"
#include "mapo/trainer.hpp"

namespace mapo {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string log;
  std::string policy;
  std::string mode;
  std::optional<std::uint64_t> seed;
  int episodes = 200;
  long long episode = 0;
};

TrainConfig load_config(const Options& o) {
  TrainConfig c;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw IoError("cannot open config '" + o.config + "'");
    c = parse_run_config(in);
  }
  if (o.seed) c.seed = *o.seed;
  if (!o.mode.empty()) c.mode = mode_from_name(o.mode);
  c.validate();
  return c;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  return f;
}

std::vector<LoggedEpisode> log_batch(const UpdateBatch& batch) {
  std::vector<LoggedEpisode> eps;
  long long id = 0;
  for (std::size_t j = 0; j < batch.groups.size(); ++j) {
    for (const auto& ep : batch.groups[j]) {
      eps.push_back({id++, static_cast<long long>(j), batch.scenarios[j].seed, ep});
    }
  }
  return eps;
}

int cmd_train(const Options& o, std::ostream& out) {
  const auto config = load_config(o);
  const fs::path dir(o.out);
  UpdateBatch last;
  const auto result = train(config, [&](const UpdateMetrics& m, const UpdateBatch& b) {
    if (m.update_index + 1 == config.updates) last = b;
  });

  auto metrics = open_out(dir / "metrics.csv");
  write_metrics_csv(metrics, result.metrics);
  auto policy = open_out(dir / "policy.txt");
  save_policy(policy, result.policy);
  auto resolved = open_out(dir / "config.txt");
  write_run_config(resolved, config);
  auto log = open_out(dir / "trajectories.jsonl");
  const auto n = write_trajectories(log_batch(last), log);

  const auto& f = result.metrics.back();
  out << "trained " << config.updates << " updates (mode " << mode_name(config.mode)
      << "), final mean_group_reward " << format_real(f.mean_group_reward, 6)
      << ", success_fraction " << format_real(f.success_fraction, 6) << "; wrote " << n
      << " trajectory records to " << dir.string() << '\n';
  return 0;
}

int cmd_compare(const Options& o, std::ostream& out) {
  auto config = load_config(o);
  const fs::path dir(o.out);
  for (auto mode : kAllModes) {
    config.mode = mode;
    const auto result = train(config);
    auto f = open_out(dir / ("metrics_" + std::string(mode_name(mode)) + ".csv"));
    write_metrics_csv(f, result.metrics);
    const auto& last = result.metrics.back();
    out << std::left << std::setw(13) << mode_name(mode) << " final mean_group_reward "
        << format_real(last.mean_group_reward, 6) << '\n';
  }
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const auto config = load_config(o);
  auto pin = open_in(o.policy);
  const auto policy = load_policy(pin);
  const auto report =
      evaluate_policy(policy, config.env, o.episodes, config.seed, config.advantage.gamma);

  const fs::path dir(o.out);
  auto eval = open_out(dir / "evaluation.csv");
  write_evaluation_csv(eval, report.axes);
  auto profile = open_out(dir / "turn_profile.csv");
  write_turn_profile_csv(profile, report.turn_profile);

  std::vector<LoggedEpisode> eps;
  for (std::size_t i = 0; i < report.episodes.size(); ++i) {
    const auto id = static_cast<long long>(i);
    eps.push_back({id, id, report.episodes[i].scenario.seed, report.episodes[i].outcome});
  }
  auto log = open_out(dir / "trajectories.jsonl");
  write_trajectories(eps, log);

  out << "success rate " << format_real(report.success_rate, 6) << " over " << o.episodes
      << " episodes\n";
  write_evaluation_csv(out, report.axes);
  return 0;
}

int cmd_advantages(const Options& o, std::ostream& out) {
  const auto config = load_config(o);
  auto in = open_in(o.log);
  const auto groups = group_episodes(read_trajectories(in));
  std::vector<AdvantageRow> rows;
  for (const auto& g : groups) {
    if (g.episodes.size() < 2) {
      throw GroupError("group " + std::to_string(g.group) + " (scenario_seed " +
                       std::to_string(g.scenario_seed) + ") has fewer than 2 episodes");
    }
    const auto r = advantage_rows(g, config.advantage);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  if (o.out.empty()) {
    write_advantages_csv(out, rows);
  } else {
    auto f = open_out(fs::path(o.out) / "advantages.csv");
    write_advantages_csv(f, rows);
    out << "wrote " << rows.size() << " rows for " << groups.size() << " groups\n";
  }
  return 0;
}

int cmd_replay(const Options& o, std::ostream& out) {
  auto in = open_in(o.log);
  const auto episodes = read_trajectories(in);
  const auto it = std::find_if(episodes.begin(), episodes.end(),
                               [&](const LoggedEpisode& e) { return e.episode == o.episode; });
  if (it == episodes.end()) {
    throw ValidationError("episode " + std::to_string(o.episode) + " not found in log");
  }
  const auto& ep = it->outcome;
  char buf[256];
  out << "episode " << it->episode << " (group " << it->group << ", scenario_seed "
      << it->scenario_seed << ")\n";
  std::snprintf(buf, sizeof buf, "%4s  %-9s  %-26s  %-26s  %9s  %6s\n", "turn", "action",
                "state", "delta", "reward", "streak");
  out << buf;
  for (const auto& r : ep.turn_records) {
    char state[64], delta[64];
    std::snprintf(state, sizeof state, "(%7.3f,%7.3f,%7.3f)", r.state_before.x(),
                  r.state_before.y(), r.state_before.z());
    std::snprintf(delta, sizeof delta, "(%7.3f,%7.3f,%7.3f)", r.delta.dx(), r.delta.dy(),
                  r.delta.dz());
    std::snprintf(buf, sizeof buf, "%4d  %-9s  %-26s  %-26s  %9.4f  %6d\n", r.turn_index,
                  action_name(r.action), state, delta, r.reward, r.regression_streak);
    out << buf;
  }
  out << "status " << status_name(ep.status) << " after " << ep.turns_used
      << " turns, final potential " << format_real(ep.final_potential, 6) << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixed-advantage policy optimization on a simulated empathy dialogue"};
  app.require_subcommand(1);
  Options o;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "Override the configured seed");
  };

  auto* train_cmd = app.add_subcommand("train", "Train a policy and write metrics and a checkpoint");
  train_cmd->add_option("--config", o.config, "Run configuration file")->check(CLI::ExistingFile);
  train_cmd->add_option("--out", o.out, "Output directory")->required();
  train_cmd->add_option("--mode", o.mode, "mapo, turn_only, batch_only or grpo_outcome");
  add_seed(train_cmd);

  auto* compare_cmd = app.add_subcommand("compare", "Train every advantage mode with shared seeds");
  compare_cmd->add_option("--config", o.config, "Run configuration file")->check(CLI::ExistingFile);
  compare_cmd->add_option("--out", o.out, "Output directory")->required();
  add_seed(compare_cmd);

  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint on fresh scenarios");
  eval_cmd->add_option("--config", o.config, "Run configuration file")->check(CLI::ExistingFile);
  eval_cmd->add_option("--policy", o.policy, "Policy checkpoint")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--episodes", o.episodes, "Number of episodes")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", o.out, "Output directory")->required();
  add_seed(eval_cmd);

  auto* adv_cmd = app.add_subcommand("advantages", "Compute per-turn advantages from a trajectory log");
  adv_cmd->add_option("--config", o.config, "Run configuration file")->check(CLI::ExistingFile);
  adv_cmd->add_option("--log", o.log, "Trajectory log (JSON lines)")->required()->check(CLI::ExistingFile);
  adv_cmd->add_option("--out", o.out, "Output directory (stdout when omitted)");

  auto* replay_cmd = app.add_subcommand("replay", "Print one logged episode turn by turn");
  replay_cmd->add_option("--log", o.log, "Trajectory log (JSON lines)")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--episode", o.episode, "Episode id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    if (*train_cmd) return cmd_train(o, out);
    if (*compare_cmd) return cmd_compare(o, out);
    if (*eval_cmd) return cmd_evaluate(o, out);
    if (*adv_cmd) return cmd_advantages(o, out);
    if (*replay_cmd) return cmd_replay(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace mapo
