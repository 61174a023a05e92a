// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mapo/advantage.hpp"
#include "mapo/dialogue_sim.hpp"
#include "mapo/errors.hpp"
#include "mapo/eval_metrics.hpp"
#include "mapo/policy.hpp"
#include "mapo/trainer.hpp"

namespace py = pybind11;
using namespace mapo;

namespace {

std::vector<std::vector<double>> weights_rows(const PolicyParams& p) {
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < p.num_actions(); ++r) {
    const auto row = p.weights().row(r);
    out.emplace_back(row.begin(), row.end());
  }
  return out;
}

PolicyParams policy_from_rows(const std::vector<std::vector<double>>& rows, double temperature) {
  if (rows.empty()) return PolicyParams();
  Matrix w(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != w.cols()) throw ShapeError("ragged policy weights");
    for (std::size_t c = 0; c < w.cols(); ++c) w(r, c) = rows[r][c];
  }
  return PolicyParams(std::move(w), temperature);
}

py::tuple state_tuple(const DeficitState& s) { return py::make_tuple(s.x(), s.y(), s.z()); }

py::dict episode_dict(const EpisodeOutcome& ep) {
  py::list turns;
  for (const auto& r : ep.turn_records) {
    py::dict t;
    t["turn"] = r.turn_index;
    t["state"] = state_tuple(r.state_before);
    t["action"] = action_name(r.action);
    t["delta"] = py::make_tuple(r.delta.dx(), r.delta.dy(), r.delta.dz());
    t["reward"] = r.reward;
    t["regression_streak"] = r.regression_streak;
    turns.append(t);
  }
  py::dict d;
  d["status"] = status_name(ep.status);
  d["turns_used"] = ep.turns_used;
  d["final_potential"] = ep.final_potential;
  d["rewards"] = ep.rewards();
  d["total_reward"] = ep.total_reward();
  d["turns"] = turns;
  return d;
}

py::dict metrics_dict(const UpdateMetrics& m) {
  py::dict d;
  d["update_index"] = m.update_index;
  d["mode"] = mode_name(m.mode);
  d["alpha"] = m.alpha;
  d["mean_group_reward"] = m.mean_group_reward;
  d["mean_return_turn0"] = m.mean_return_turn0;
  d["grad_norm"] = m.grad_norm;
  d["success_fraction"] = m.success_fraction;
  return d;
}

Scenario make_scenario(const std::array<double, 3>& state, std::uint64_t seed) {
  const DeficitState s(state[0], state[1], state[2]);
  return Scenario{s, dominant_axis(s), seed};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Critic-free mixed-advantage policy gradient on a simulated dialogue environment";

  py::register_exception<Error>(m, "MapoError", PyExc_ValueError);

  py::class_<EnvParams>(m, "EnvParams")
      .def(py::init<>())
      .def_readwrite("effectiveness", &EnvParams::effectiveness)
      .def_readwrite("noise_std", &EnvParams::noise_std)
      .def_readwrite("frustration", &EnvParams::frustration)
      .def_readwrite("repeat_decay", &EnvParams::repeat_decay)
      .def_readwrite("success_epsilon", &EnvParams::success_epsilon)
      .def_readwrite("fail_streak", &EnvParams::fail_streak)
      .def_readwrite("max_turns", &EnvParams::max_turns)
      .def_readwrite("init_max", &EnvParams::init_max)
      .def("validate", &EnvParams::validate);

  py::class_<AdvantageConfig>(m, "AdvantageConfig")
      .def(py::init<>())
      .def_readwrite("gamma", &AdvantageConfig::gamma)
      .def_readwrite("alpha", &AdvantageConfig::alpha)
      .def_readwrite("sigma_epsilon", &AdvantageConfig::sigma_epsilon)
      .def("validate", &AdvantageConfig::validate);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_property(
          "mode", [](const TrainConfig& c) { return std::string(mode_name(c.mode)); },
          [](TrainConfig& c, const std::string& s) { c.mode = mode_from_name(s); })
      .def_readwrite("group_size", &TrainConfig::group_size)
      .def_readwrite("updates", &TrainConfig::updates)
      .def_readwrite("scenarios_per_update", &TrainConfig::scenarios_per_update)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("grad_clip", &TrainConfig::grad_clip)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("rollout_threads", &TrainConfig::rollout_threads)
      .def_readwrite("advantage", &TrainConfig::advantage)
      .def_readwrite("env", &TrainConfig::env)
      .def("effective_alpha", &TrainConfig::effective_alpha)
      .def("validate", &TrainConfig::validate);

  m.def("potential", [](const std::array<double, 3>& s) {
    return potential(DeficitState(s[0], s[1], s[2]));
  });
  m.def("incremental_reward", [](const std::array<double, 3>& before, const std::array<double, 3>& after) {
    return incremental_reward(DeficitState(before[0], before[1], before[2]),
                              DeficitState(after[0], after[1], after[2]));
  });
  m.def("alignment_score", [](const std::array<double, 3>& s, const std::array<double, 3>& d) {
    return alignment_score(DeficitState(s[0], s[1], s[2]), JudgeDelta(d[0], d[1], d[2]));
  });

  m.def("mc_returns", [](const std::vector<double>& r, double gamma) { return mc_returns(r, gamma); },
        py::arg("rewards"), py::arg("gamma") = 1.0);
  m.def("compute_t_min", [](const std::vector<std::size_t>& lengths) { return compute_t_min(lengths); });
  m.def("turn_level_advantages",
        [](const Ragged& returns, std::size_t t_min, double eps) {
          auto r = turn_level_advantages(returns, t_min, eps);
          return py::make_tuple(r.advantages, r.mask);
        },
        py::arg("returns"), py::arg("t_min"), py::arg("sigma_epsilon") = 1e-8);
  m.def("batch_level_advantages",
        [](const Ragged& rewards, double eps) { return batch_level_advantages(rewards, eps); },
        py::arg("rewards"), py::arg("sigma_epsilon") = 1e-8);
  m.def("mixed_advantages", &mixed_advantages, py::arg("turn_adv"), py::arg("batch_adv"),
        py::arg("mask"), py::arg("alpha"));
  m.def("mixture_variance_formula", &mixture_variance_formula, py::arg("alpha"),
        py::arg("covariance"));
  m.def("compute_advantages",
        [](const Ragged& rewards, const AdvantageConfig& cfg) {
          const auto a = compute_advantages(TrajectoryGroup::from_rewards(rewards), cfg);
          py::dict d;
          d["returns"] = a.returns;
          d["turn_adv"] = a.turn_adv;
          d["batch_adv"] = a.batch_adv;
          d["mixed_adv"] = a.mixed_adv;
          d["loss_mask"] = a.loss_mask;
          d["t_min"] = a.t_min;
          return d;
        },
        py::arg("rewards"), py::arg("config") = AdvantageConfig{});

  m.def("sample_scenario",
        [](std::uint64_t seed, const EnvParams& env) {
          const auto s = sample_scenario(seed, env);
          py::dict d;
          d["state"] = state_tuple(s.initial_state);
          d["dominant_axis"] = axis_name(s.dominant_axis);
          d["seed"] = s.seed;
          return d;
        },
        py::arg("seed"), py::arg("env") = EnvParams{});

  m.def("run_episode",
        [](const std::array<double, 3>& state, std::uint64_t scenario_seed, std::uint64_t action_seed,
           const std::vector<std::vector<double>>& weights, const EnvParams& env, bool greedy) {
          const auto policy = policy_from_rows(weights, 1.0);
          return episode_dict(run_episode(policy, make_scenario(state, scenario_seed), action_seed, env,
                                          greedy ? ActionSelection::Greedy : ActionSelection::Sample));
        },
        py::arg("state"), py::arg("scenario_seed"), py::arg("action_seed"),
        py::arg("weights") = std::vector<std::vector<double>>{}, py::arg("env") = EnvParams{},
        py::arg("greedy") = false);

  m.def("rollout_group",
        [](const std::array<double, 3>& state, std::uint64_t scenario_seed, int k, std::uint64_t base_seed,
           const std::vector<std::vector<double>>& weights, const EnvParams& env) {
          const auto policy = policy_from_rows(weights, 1.0);
          py::list out;
          for (const auto& ep : rollout_group(policy, make_scenario(state, scenario_seed), k, base_seed, env))
            out.append(episode_dict(ep));
          return out;
        },
        py::arg("state"), py::arg("scenario_seed"), py::arg("k"), py::arg("base_seed"),
        py::arg("weights") = std::vector<std::vector<double>>{}, py::arg("env") = EnvParams{});

  m.def("train",
        [](const TrainConfig& cfg) {
          TrainResult result;
          {
            py::gil_scoped_release release;
            result = train(cfg);
          }
          py::list metrics;
          for (const auto& row : result.metrics) metrics.append(metrics_dict(row));
          py::dict d;
          d["metrics"] = metrics;
          d["weights"] = weights_rows(result.policy);
          return d;
        },
        py::arg("config") = TrainConfig{});

  m.def("evaluate",
        [](const std::vector<std::vector<double>>& weights, const EnvParams& env, int episodes,
           std::uint64_t seed, double gamma) {
          const auto policy = policy_from_rows(weights, 1.0);
          EvaluationReport report;
          {
            py::gil_scoped_release release;
            report = evaluate_policy(policy, env, episodes, seed, gamma);
          }
          py::list axes;
          for (const auto& a : report.axes) {
            py::dict d;
            d["axis"] = axis_name(a.axis);
            d["episodes"] = a.episodes;
            d["success_rate"] = a.success_rate();
            d["mean_alignment"] = a.mean_alignment();
            axes.append(d);
          }
          py::list profile;
          for (const auto& r : report.turn_profile) {
            py::dict d;
            d["turn"] = r.turn;
            d["episodes"] = r.episodes;
            d["mean_return"] = r.mean_return;
            d["mean_reward"] = r.mean_reward;
            profile.append(d);
          }
          py::dict d;
          d["success_rate"] = report.success_rate;
          d["axes"] = axes;
          d["turn_profile"] = profile;
          return d;
        },
        py::arg("weights") = std::vector<std::vector<double>>{}, py::arg("env") = EnvParams{},
        py::arg("episodes") = 200, py::arg("seed") = 0, py::arg("gamma") = 1.0);

  m.attr("NUM_ACTIONS") = kNumActions;
  m.attr("FEATURE_DIM") = kFeatureDim;
}
