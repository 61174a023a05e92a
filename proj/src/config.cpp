// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>

#include "mapo/errors.hpp"
#include "mapo/io.hpp"

namespace mapo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
  }
  return out;
}

using Setter = std::function<void(TrainConfig&, const std::string&, const std::string&)>;

template <class T, class Member>
Setter number(Member member) {
  return [member](TrainConfig& c, const std::string& k, const std::string& v) {
    std::invoke(member, c) = parse_number<T>(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"mode", [](TrainConfig& c, const std::string&, const std::string& v) { c.mode = mode_from_name(v); }},
      {"group_size", number<int>([](TrainConfig& c) -> int& { return c.group_size; })},
      {"updates", number<int>([](TrainConfig& c) -> int& { return c.updates; })},
      {"scenarios_per_update", number<int>([](TrainConfig& c) -> int& { return c.scenarios_per_update; })},
      {"learning_rate", number<double>([](TrainConfig& c) -> double& { return c.learning_rate; })},
      {"grad_clip",
       [](TrainConfig& c, const std::string& k, const std::string& v) {
         if (v == "none") {
           c.grad_clip.reset();
         } else {
           c.grad_clip = parse_number<double>(k, v);
         }
       }},
      {"seed", number<std::uint64_t>([](TrainConfig& c) -> std::uint64_t& { return c.seed; })},
      {"rollout_threads", number<int>([](TrainConfig& c) -> int& { return c.rollout_threads; })},
      {"advantage.gamma", number<double>([](TrainConfig& c) -> double& { return c.advantage.gamma; })},
      {"advantage.alpha", number<double>([](TrainConfig& c) -> double& { return c.advantage.alpha; })},
      {"advantage.sigma_epsilon", number<double>([](TrainConfig& c) -> double& { return c.advantage.sigma_epsilon; })},
      {"env.effectiveness", number<double>([](TrainConfig& c) -> double& { return c.env.effectiveness; })},
      {"env.noise_std", number<double>([](TrainConfig& c) -> double& { return c.env.noise_std; })},
      {"env.frustration", number<double>([](TrainConfig& c) -> double& { return c.env.frustration; })},
      {"env.repeat_decay", number<double>([](TrainConfig& c) -> double& { return c.env.repeat_decay; })},
      {"env.success_epsilon", number<double>([](TrainConfig& c) -> double& { return c.env.success_epsilon; })},
      {"env.fail_streak", number<int>([](TrainConfig& c) -> int& { return c.env.fail_streak; })},
      {"env.max_turns", number<int>([](TrainConfig& c) -> int& { return c.env.max_turns; })},
      {"env.init_max", number<double>([](TrainConfig& c) -> double& { return c.env.init_max; })},
  };
  return table;
}

}  // namespace

TrainConfig parse_run_config(std::istream& in) {
  TrainConfig config;
  std::set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected `key = value`");
    }
    const auto key = trim(text.substr(0, eq));
    const auto value = trim(text.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    try {
      it->second(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line) + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

void write_run_config(std::ostream& out, const TrainConfig& c) {
  auto real = [](double v) { return format_real(v, 17); };
  out << "mode = " << mode_name(c.mode) << '\n'
      << "group_size = " << c.group_size << '\n'
      << "updates = " << c.updates << '\n'
      << "scenarios_per_update = " << c.scenarios_per_update << '\n'
      << "learning_rate = " << real(c.learning_rate) << '\n'
      << "grad_clip = " << (c.grad_clip ? real(*c.grad_clip) : std::string("none")) << '\n'
      << "seed = " << c.seed << '\n'
      << "rollout_threads = " << c.rollout_threads << '\n'
      << "advantage.gamma = " << real(c.advantage.gamma) << '\n'
      << "advantage.alpha = " << real(c.advantage.alpha) << '\n'
      << "advantage.sigma_epsilon = " << real(c.advantage.sigma_epsilon) << '\n'
      << "env.effectiveness = " << real(c.env.effectiveness) << '\n'
      << "env.noise_std = " << real(c.env.noise_std) << '\n'
      << "env.frustration = " << real(c.env.frustration) << '\n'
      << "env.repeat_decay = " << real(c.env.repeat_decay) << '\n'
      << "env.success_epsilon = " << real(c.env.success_epsilon) << '\n'
      << "env.fail_streak = " << c.env.fail_streak << '\n'
      << "env.max_turns = " << c.env.max_turns << '\n'
      << "env.init_max = " << real(c.env.init_max) << '\n';
}

}  // namespace mapo
