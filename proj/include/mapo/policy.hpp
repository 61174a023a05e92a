// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mapo/empathy_state.hpp"
#include "mapo/env_params.hpp"
#include "mapo/rng.hpp"

namespace mapo {

enum class Action : int { Cognitive = 0, Affective = 1, Proactive = 2, Probe = 3 };

inline constexpr std::size_t kNumActions = 4;
inline constexpr std::size_t kFeatureDim = 12;

/// Throws DomainError for ids outside [0, 4).
Action action_from_index(long long id);
inline std::size_t action_index(Action a) { return static_cast<std::size_t>(a); }
const char* action_name(Action a);

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double frobenius_norm() const;
  bool all_finite() const;
  Matrix& operator+=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Linear-softmax policy weights (one row per action) and temperature.
class PolicyParams {
 public:
  PolicyParams() : PolicyParams(Matrix(kNumActions, kFeatureDim)) {}
  /// Throws PolicyError on non-finite weights or non-positive temperature.
  explicit PolicyParams(Matrix weights, double temperature = 1.0);

  const Matrix& weights() const { return weights_; }
  double temperature() const { return temperature_; }
  std::size_t num_actions() const { return weights_.rows(); }
  std::size_t feature_dim() const { return weights_.cols(); }

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;

 private:
  Matrix weights_;
  double temperature_ = 1.0;
};

/// Probabilities over the action set; validated to be non-negative and sum to 1.
class ActionDistribution {
 public:
  explicit ActionDistribution(std::vector<double> probs);
  const std::vector<double>& probs() const { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::size_t size() const { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

using FeatureVector = std::array<double, kFeatureDim>;

/// What the policy conditions on: a fixed-size summary of the dialogue so far.
struct HistorySummary {
  DeficitState state;
  std::optional<Action> last_action;
  int regression_streak = 0;
  int turn_index = 0;
  int repeat_count = 0;  // length of the trailing run of last_action
};

/// Layout: [x, y, z]/init_max, potential/(sqrt(3) init_max), one-hot last
/// action, streak/fail_streak, turn/max_turns, repeat/max_turns, bias 1.
FeatureVector featurize(const HistorySummary& history, const EnvParams& params);

/// Temperature-scaled softmax with max subtraction.
std::vector<double> softmax(std::span<const double> logits, double temperature);

/// Throws PolicyError if a logit is non-finite or the feature size mismatches.
ActionDistribution action_probs(const PolicyParams& theta, std::span<const double> features);

/// Inverse-CDF draw over the fixed action order; consumes one uniform.
std::size_t sample_action(const ActionDistribution& dist, RandomStream& rng);

std::size_t greedy_action(const ActionDistribution& dist);

/// Gradient of log p(action | features) w.r.t. the weights:
/// row b = ((b == action) - p_b) / temperature * features.
Matrix log_prob_grad(const PolicyParams& theta, std::span<const double> features,
                     std::size_t action);

/// Checkpoint text: `mapo-policy v1 <rows> <cols> <temperature>` then one
/// line of space-separated weights per row.
void save_policy(std::ostream& out, const PolicyParams& policy);
/// Throws ParseError on malformed input.
PolicyParams load_policy(std::istream& in);

}  // namespace mapo
