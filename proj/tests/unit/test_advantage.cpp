// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "../support/oracles.hpp"
#include "mapo/advantage.hpp"
#include "mapo/errors.hpp"

using namespace mapo;

namespace {

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

double pop_std(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / v.size());
}

}  // namespace

TEST_CASE("mc_returns") {
  CHECK(mc_returns(std::vector<double>{5.0}, 1.0) == std::vector<double>{5.0});
  const auto r = mc_returns(std::vector<double>{1.0, 2.0}, 0.9);
  CHECK(r[0] == doctest::Approx(2.8));
  CHECK(r[1] == 2.0);
  CHECK(mc_returns(std::vector<double>{1.0, -1.0, 2.0}, 1.0) == std::vector<double>{2.0, 1.0, 2.0});

  CHECK_THROWS_AS(mc_returns(std::vector<double>{1.0}, 0.0), ConfigError);
  CHECK_THROWS_AS(mc_returns(std::vector<double>{1.0}, 1.5), ConfigError);
}

TEST_CASE("mc_returns with gamma 1 equals naive suffix sums exactly") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto group = oracle::random_group(gen, 1, 1, 20);
    const auto fast = mc_returns(group[0], 1.0);
    // suffix sums accumulated in the same backward order
    for (std::size_t t = 0; t < fast.size(); ++t) {
      double s = 0.0;
      for (std::size_t i = group[0].size(); i-- > t;) s += group[0][i];
      CHECK(fast[t] == s);
    }
  }
}

TEST_CASE("t_min") {
  const std::vector<std::size_t> a{3, 5, 4}, b{7, 7, 7, 7}, c{1, 15}, empty;
  CHECK(compute_t_min(a) == 3);
  CHECK(compute_t_min(b) == 7);
  CHECK(compute_t_min(c) == 1);
  CHECK_THROWS_AS(compute_t_min(empty), GroupError);
}

TEST_CASE("group construction") {
  CHECK_THROWS_AS(TrajectoryGroup::from_rewards({{1.0, 2.0}}), GroupError);
  CHECK_THROWS_AS(TrajectoryGroup::from_rewards({{1.0}, {}}), GroupError);
  CHECK_THROWS_AS(TrajectoryGroup::from_rewards({{1.0}, {std::nan("")}}), GroupError);
  const auto g = TrajectoryGroup::from_rewards({{1, 2, 3}, {1, 2, 3, 4, 5}, {1, 2, 3, 4}});
  CHECK(g.t_min() == 3);
}

TEST_CASE("turn-level advantages") {
  const auto out = turn_level_advantages({{1}, {2}, {3}, {4}}, 1, 1e-8);
  const double expected[] = {-1.3416407865, -0.4472135955, 0.4472135955, 1.3416407865};
  for (int i = 0; i < 4; ++i) CHECK(out.advantages[i][0] == doctest::Approx(expected[i]).epsilon(1e-9));

  const auto flat = turn_level_advantages({{2}, {2}, {2}, {2}}, 1, 1e-8);
  for (const auto& a : flat.advantages) CHECK(a[0] == 0.0);
  for (const auto& m : flat.mask) CHECK(m[0]);

  // turns beyond t_min are zero and masked
  const auto ragged = turn_level_advantages({{1, 5, 6}, {2, 1}}, 2, 1e-8);
  CHECK(ragged.advantages[0][2] == 0.0);
  CHECK_FALSE(ragged.mask[0][2]);
  CHECK(ragged.mask[0][1]);
  CHECK(ragged.mask[1][1]);

  CHECK_THROWS_AS(turn_level_advantages({{1, 2}}, 1, 1e-8), GroupError);
  CHECK_THROWS_AS(turn_level_advantages({{1, 2}, {1}}, 2, 1e-8), ShapeError);
}

TEST_CASE("batch-level advantages") {
  const auto out = batch_level_advantages(std::vector<double>{1, 3, 5, 7}, 1e-8);
  const double expected[] = {-1.3416407865, -0.4472135955, 0.4472135955, 1.3416407865};
  for (int i = 0; i < 4; ++i) CHECK(out[i] == doctest::Approx(expected[i]).epsilon(1e-9));
  CHECK(batch_level_advantages(std::vector<double>{0.7, 0.7, 0.7}, 1e-8) == std::vector<double>(3, 0.0));
  CHECK_THROWS_AS(batch_level_advantages(std::vector<double>{1.0}, 1e-8), BatchError);

  // statistics include turns beyond t_min
  const Ragged rewards{{1, 2, 9, 4}, {3, 0}};
  const auto ragged = batch_level_advantages(rewards, 1e-8);
  const auto naive = oracle::batch_advantages(rewards);
  for (std::size_t i = 0; i < rewards.size(); ++i)
    for (std::size_t t = 0; t < rewards[i].size(); ++t) CHECK(ragged[i][t] == doctest::Approx(naive[i][t]).epsilon(1e-12));
}

TEST_CASE("mixed advantages") {
  const RaggedMask on{{true}};
  CHECK(mixed_advantages({{1.0}}, {{-1.0}}, on, 0.5)[0][0] == 0.0);
  CHECK(mixed_advantages({{-1.3416}}, {{0.4472}}, on, 0.5)[0][0] == doctest::Approx(-0.4472).epsilon(1e-3));
  const Ragged t{{0.3, -1.1}, {2.0, 0.25}}, b{{1.7, 0.2}, {-0.5, 9.0}};
  const RaggedMask m{{true, true}, {true, false}};
  const auto one = mixed_advantages(t, b, m, 1.0);
  CHECK(one[0] == t[0]);
  CHECK(one[1][0] == t[1][0]);
  CHECK(one[1][1] == 0.0);

  CHECK_THROWS_AS(mixed_advantages({{1.0, 2.0}}, {{1.0}}, {{true, true}}, 0.5), ShapeError);
  CHECK_THROWS_AS(mixed_advantages({{1.0}}, {{1.0}}, {{true}}, 1.5), ConfigError);
}

TEST_CASE("mixture variance closed form") {
  CHECK(mixture_variance_formula(0.5, 1.0) == 1.0);
  CHECK(mixture_variance_formula(0.5, -1.0) == 0.0);
  CHECK(mixture_variance_formula(0.5, 0.0) == 0.5);
  CHECK_THROWS_AS(mixture_variance_formula(0.5, 1.1), DomainError);

  for (double c : {-1.0, -0.4, 0.0, 0.3, 0.99}) {
    double best = 2.0, arg = -1.0;
    for (int i = 0; i <= 10; ++i) {
      const double v = mixture_variance_formula(i / 10.0, c);
      CHECK(v <= 1.0 + 1e-12);
      if (v < best) best = v, arg = i / 10.0;
    }
    CHECK(arg == doctest::Approx(0.5));
  }
}

TEST_CASE("normalization properties on random ragged groups") {
  std::mt19937_64 gen(5);
  AdvantageConfig cfg;
  for (int trial = 0; trial < 100; ++trial) {
    const auto k = 2 + trial % 6;
    const auto rewards = oracle::random_group(gen, k, 1, 15);
    const auto group = TrajectoryGroup::from_rewards(rewards);
    const auto tensor = compute_advantages(group, cfg);

    for (std::size_t t = 0; t < tensor.t_min; ++t) {
      std::vector<double> col;
      for (std::size_t i = 0; i < k; ++i) col.push_back(tensor.turn_adv[i][t]);
      CHECK(std::abs(mean(col)) < 1e-9);
      CHECK(std::abs(pop_std(col) - 1.0) < 1e-9);
    }
    std::vector<double> flat;
    for (const auto& r : tensor.batch_adv) flat.insert(flat.end(), r.begin(), r.end());
    CHECK(std::abs(mean(flat)) < 1e-9);
    CHECK(std::abs(pop_std(flat) - 1.0) < 1e-9);

    const double turn_bound = std::sqrt(static_cast<double>(k) - 1.0) + 1e-9;
    const double batch_bound = std::sqrt(static_cast<double>(flat.size()) - 1.0) + 1e-9;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t t = 0; t < rewards[i].size(); ++t) {
        CHECK(std::abs(tensor.turn_adv[i][t]) <= turn_bound);
        CHECK(std::abs(tensor.batch_adv[i][t]) <= batch_bound);
        CHECK(tensor.loss_mask[i][t] == (t < tensor.t_min));
        if (!tensor.loss_mask[i][t]) CHECK(tensor.mixed_adv[i][t] == 0.0);
      }
    }
  }
}

TEST_CASE("equal-length groups have no masked turns") {
  const auto tensor = compute_advantages(TrajectoryGroup::from_rewards({{1, 2, 3}, {0, 1, 5}, {2, 2, 2}}), {});
  CHECK(tensor.t_min == 3);
  for (const auto& m : tensor.loss_mask)
    for (bool b : m) CHECK(b);
}

TEST_CASE("engine matches the naive oracle") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 50; ++trial) {
    const double gamma = trial % 2 ? 1.0 : 0.9;
    const double alpha = (trial % 5) / 4.0;
    const auto rewards = oracle::random_group(gen, 4, 3, 15);
    const auto tensor = compute_advantages(TrajectoryGroup::from_rewards(rewards), {gamma, alpha, 1e-8});

    oracle::Ragged ret;
    for (const auto& r : rewards) ret.push_back(oracle::returns(r, gamma));
    const auto t_min = oracle::shortest(rewards);
    const auto turn = oracle::turn_advantages(ret, t_min);
    const auto batch = oracle::batch_advantages(rewards);
    const auto mixed = oracle::mixture(turn, batch, t_min, alpha);
    for (std::size_t i = 0; i < rewards.size(); ++i) {
      for (std::size_t t = 0; t < rewards[i].size(); ++t) {
        CHECK(std::abs(tensor.returns[i][t] - ret[i][t]) <= 1e-12);
        CHECK(std::abs(tensor.turn_adv[i][t] - turn[i][t]) <= 1e-12);
        CHECK(std::abs(tensor.batch_adv[i][t] - batch[i][t]) <= 1e-12);
        CHECK(std::abs(tensor.mixed_adv[i][t] - mixed[i][t]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("advantage config validation") {
  CHECK_NOTHROW(AdvantageConfig{}.validate());
  CHECK(AdvantageConfig{}.beta() == 0.5);
  CHECK_THROWS_AS((AdvantageConfig{0.0, 0.5, 1e-8}.validate()), ConfigError);
  CHECK_THROWS_AS((AdvantageConfig{1.0, -0.1, 1e-8}.validate()), ConfigError);
  CHECK_THROWS_AS((AdvantageConfig{1.0, 0.5, 0.0}.validate()), ConfigError);
}
