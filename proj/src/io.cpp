// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "mapo/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "mapo/errors.hpp"

namespace mapo {

namespace {

constexpr double kRewardTolerance = 1e-6;
constexpr double kContinuityTolerance = 1e-6;

using json = nlohmann::json;

std::string triple(const std::array<double, 3>& v) {
  return "[" + format_real(v[0]) + "," + format_real(v[1]) + "," + format_real(v[2]) + "]";
}

const json& field(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(line, std::string("missing key '") + key + "'");
  return *it;
}

long long int_field(const json& obj, const char* key, std::size_t line) {
  const auto& v = field(obj, key, line);
  if (!v.is_number_integer()) throw ParseError(line, std::string("'") + key + "' must be an integer");
  return v.get<long long>();
}

std::array<double, 3> triple_field(const json& obj, const char* key, std::size_t line) {
  const auto& v = field(obj, key, line);
  if (!v.is_array() || v.size() != 3) {
    throw ParseError(line, std::string("'") + key + "' must be an array of 3 reals");
  }
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) throw ParseError(line, std::string("'") + key + "' must hold reals");
    out[i] = v[i].get<double>();
  }
  return out;
}

struct ParsedRecord {
  std::size_t line = 0;
  long long episode = 0;
  long long group = 0;
  std::uint64_t scenario_seed = 0;
  long long turn = 0;
  DeficitState state;
  Action action = Action::Probe;
  JudgeDelta delta;
  double reward = 0.0;
  std::string terminal;
};

ParsedRecord parse_record(const std::string& text, std::size_t line) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(line, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ParseError(line, "record must be a JSON object");

  ParsedRecord r;
  r.line = line;
  r.episode = int_field(obj, "episode", line);
  r.group = int_field(obj, "group", line);
  const auto& seed = field(obj, "scenario_seed", line);
  if (!seed.is_number_unsigned()) throw ParseError(line, "'scenario_seed' must be an unsigned integer");
  r.scenario_seed = seed.get<std::uint64_t>();
  r.turn = int_field(obj, "turn", line);

  const auto s = triple_field(obj, "state", line);
  const auto d = triple_field(obj, "delta", line);
  const auto& reward = field(obj, "reward", line);
  if (!reward.is_number()) throw ParseError(line, "'reward' must be a real");
  r.reward = reward.get<double>();
  const auto& terminal = field(obj, "terminal", line);
  if (!terminal.is_string()) throw ParseError(line, "'terminal' must be a string");
  r.terminal = terminal.get<std::string>();
  if (r.terminal != "none" && r.terminal != "success" && r.terminal != "failure" &&
      r.terminal != "max_turns") {
    throw ParseError(line, "unknown terminal '" + r.terminal + "'");
  }

  const std::string where = "line " + std::to_string(line) + ": ";
  try {
    r.action = action_from_index(int_field(obj, "action", line));
  } catch (const DomainError& e) {
    throw ValidationError(where + e.what());
  }
  try {
    r.state = DeficitState(s[0], s[1], s[2]);
    r.delta = JudgeDelta(d[0], d[1], d[2]);
  } catch (const Error& e) {
    throw ValidationError(where + e.what());
  }
  return r;
}

LoggedEpisode finish_episode(const std::vector<ParsedRecord>& recs) {
  const auto& first = recs.front();
  const auto& last = recs.back();
  const std::string name = "episode " + std::to_string(first.episode);
  if (last.terminal == "none") {
    throw ValidationError(name + ": last record (line " + std::to_string(last.line) +
                          ") has no terminal status");
  }
  LoggedEpisode ep;
  ep.episode = first.episode;
  ep.group = first.group;
  ep.scenario_seed = first.scenario_seed;
  ep.outcome.status = status_from_name(last.terminal);

  int streak = 0;
  for (std::size_t t = 0; t < recs.size(); ++t) {
    const auto& r = recs[t];
    streak = r.reward < 0.0 ? streak + 1 : 0;
    ep.outcome.turn_records.push_back(
        TurnRecord{static_cast<int>(t), r.state, r.action, r.delta, r.reward, streak});
  }
  ep.outcome.turns_used = static_cast<int>(recs.size());
  ep.outcome.final_potential = potential(ep.outcome.final_state());
  return ep;
}

}  // namespace

std::vector<EpisodeOutcome> EpisodeGroup::outcomes() const {
  std::vector<EpisodeOutcome> out;
  for (const auto& e : episodes) out.push_back(e.outcome);
  return out;
}

std::string format_real(double v, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant_digits, v);
  return buf;
}

std::size_t write_trajectories(std::span<const LoggedEpisode> episodes, std::ostream& out) {
  std::size_t count = 0;
  for (const auto& ep : episodes) {
    const auto& records = ep.outcome.turn_records;
    for (std::size_t t = 0; t < records.size(); ++t) {
      const auto& r = records[t];
      const char* terminal = t + 1 == records.size() ? status_name(ep.outcome.status) : "none";
      out << "{\"episode\":" << ep.episode << ",\"group\":" << ep.group
          << ",\"scenario_seed\":" << ep.scenario_seed << ",\"turn\":" << r.turn_index
          << ",\"state\":" << triple(r.state_before.components())
          << ",\"action\":" << action_index(r.action) << ",\"delta\":" << triple(r.delta.components())
          << ",\"reward\":" << format_real(r.reward) << ",\"terminal\":\"" << terminal << "\"}\n";
      ++count;
    }
  }
  out.flush();
  if (!out) throw IoError("failed to write trajectory log");
  return count;
}

std::vector<LoggedEpisode> read_trajectories(std::istream& in) {
  std::vector<LoggedEpisode> out;
  std::vector<ParsedRecord> current;
  std::map<long long, bool> seen;
  std::string text;
  std::size_t line = 0;

  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    ParsedRecord r = parse_record(text, line);
    const std::string name =
        "episode " + std::to_string(r.episode) + ", turn " + std::to_string(r.turn);

    if (!current.empty() && current.front().episode != r.episode) {
      out.push_back(finish_episode(current));
      current.clear();
    }
    if (current.empty()) {
      if (seen.count(r.episode)) {
        throw ValidationError("line " + std::to_string(line) + ": episode " +
                              std::to_string(r.episode) + " is not contiguous");
      }
      seen[r.episode] = true;
    } else {
      const auto& prev = current.back();
      if (prev.terminal != "none") {
        throw ValidationError(name + " (line " + std::to_string(line) + "): record after terminal turn");
      }
      if (r.group != prev.group || r.scenario_seed != prev.scenario_seed) {
        throw ValidationError(name + " (line " + std::to_string(line) +
                              "): group or scenario_seed changes within the episode");
      }
      const auto expected = apply_delta(prev.state, prev.delta);
      for (std::size_t i = 0; i < kNumAxes; ++i) {
        if (std::abs(expected[i] - r.state[i]) > kContinuityTolerance) {
          throw ValidationError(name + " (line " + std::to_string(line) +
                                "): state does not follow from the previous turn");
        }
      }
    }
    if (r.turn != static_cast<long long>(current.size())) {
      throw ValidationError(name + " (line " + std::to_string(line) + "): expected turn " +
                            std::to_string(current.size()));
    }
    const double idr = incremental_reward(r.state, apply_delta(r.state, r.delta));
    if (std::abs(idr - r.reward) > kRewardTolerance) {
      throw ValidationError(name + " (line " + std::to_string(line) + "): reward " +
                            format_real(r.reward) + " disagrees with states (" + format_real(idr) + ")");
    }
    current.push_back(std::move(r));
  }
  if (in.bad()) throw IoError("failed to read trajectory log");
  if (!current.empty()) out.push_back(finish_episode(current));
  return out;
}

std::vector<EpisodeGroup> group_episodes(const std::vector<LoggedEpisode>& episodes) {
  std::vector<EpisodeGroup> groups;
  for (const auto& ep : episodes) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const EpisodeGroup& g) {
      return g.scenario_seed == ep.scenario_seed && g.group == ep.group;
    });
    if (it == groups.end()) {
      groups.push_back({ep.scenario_seed, ep.group, {}});
      it = std::prev(groups.end());
    }
    it->episodes.push_back(ep);
  }
  return groups;
}

void write_metrics_csv(std::ostream& out, std::span<const UpdateMetrics> metrics) {
  out << "update,mode,alpha,mean_group_reward,mean_return_turn0,grad_norm,success_fraction\n";
  for (const auto& m : metrics) {
    out << m.update_index << ',' << mode_name(m.mode) << ',' << format_real(m.alpha) << ','
        << format_real(m.mean_group_reward) << ',' << format_real(m.mean_return_turn0) << ','
        << format_real(m.grad_norm) << ',' << format_real(m.success_fraction) << '\n';
  }
}

void write_evaluation_csv(std::ostream& out, const std::array<AxisStats, kNumAxes>& axes) {
  out << "axis,episodes,success_rate,mean_alignment\n";
  for (const auto& a : axes) {
    const auto align = a.mean_alignment();
    out << axis_name(a.axis) << ',' << a.episodes << ',' << format_real(a.success_rate()) << ','
        << (align ? format_real(*align) : std::string()) << '\n';
  }
}

void write_turn_profile_csv(std::ostream& out, std::span<const TurnProfileRow> rows) {
  out << "turn,episodes,mean_return,mean_reward\n";
  for (const auto& r : rows) {
    out << r.turn << ',' << r.episodes << ',' << format_real(r.mean_return) << ','
        << format_real(r.mean_reward) << '\n';
  }
}

std::vector<AdvantageRow> advantage_rows(const EpisodeGroup& group, const AdvantageConfig& config) {
  Ragged rewards;
  for (const auto& ep : group.episodes) rewards.push_back(ep.outcome.rewards());
  const auto tensor = compute_advantages(TrajectoryGroup::from_rewards(rewards), config);

  std::vector<AdvantageRow> rows;
  for (std::size_t i = 0; i < group.episodes.size(); ++i) {
    for (std::size_t t = 0; t < rewards[i].size(); ++t) {
      rows.push_back({group.episodes[i].episode, static_cast<int>(t), tensor.returns[i][t],
                      tensor.turn_adv[i][t], tensor.batch_adv[i][t], tensor.mixed_adv[i][t],
                      tensor.loss_mask[i][t]});
    }
  }
  return rows;
}

void write_advantages_csv(std::ostream& out, std::span<const AdvantageRow> rows) {
  out << "episode,turn,return,turn_adv,batch_adv,mixed_adv,mask\n";
  for (const auto& r : rows) {
    out << r.episode << ',' << r.turn << ',' << format_real(r.ret) << ',' << format_real(r.turn_adv)
        << ',' << format_real(r.batch_adv) << ',' << format_real(r.mixed_adv) << ','
        << (r.mask ? 1 : 0) << '\n';
  }
}

}  // namespace mapo
