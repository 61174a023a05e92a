// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>

namespace mapo {

/// Empathy axes, in the fixed order used for tie-breaking and serialization.
enum class Axis : int { Cognitive = 0, Affective = 1, Proactive = 2 };

inline constexpr std::size_t kNumAxes = 3;

const char* axis_name(Axis axis);

/// The user's empathy-deficit vector (cognitive, affective, proactive).
/// Components are unclamped; overshoot past zero is penalized by the potential.
class DeficitState {
 public:
  DeficitState() = default;
  /// Throws InvalidStateError on non-finite components.
  DeficitState(double x, double y, double z);

  double x() const { return v_[0]; }
  double y() const { return v_[1]; }
  double z() const { return v_[2]; }
  double operator[](Axis a) const { return v_[static_cast<int>(a)]; }
  double operator[](std::size_t i) const { return v_[i]; }
  const std::array<double, 3>& components() const { return v_; }

  friend bool operator==(const DeficitState&, const DeficitState&) = default;

 private:
  std::array<double, 3> v_{0.0, 0.0, 0.0};
};

/// Per-turn judge output; every component strictly inside (-2, 2).
class JudgeDelta {
 public:
  static constexpr double kBound = 2.0;

  JudgeDelta() = default;
  /// Throws DomainError if any component is non-finite or has magnitude >= 2.
  JudgeDelta(double dx, double dy, double dz);

  double dx() const { return v_[0]; }
  double dy() const { return v_[1]; }
  double dz() const { return v_[2]; }
  double operator[](std::size_t i) const { return v_[i]; }
  const std::array<double, 3>& components() const { return v_; }

  friend bool operator==(const JudgeDelta&, const JudgeDelta&) = default;

 private:
  std::array<double, 3> v_{0.0, 0.0, 0.0};
};

/// Euclidean distance of the deficit from the origin.
double potential(const DeficitState& state);

/// Component-wise sum, unclamped. Throws InvalidStateError on a non-finite result.
DeficitState apply_delta(const DeficitState& state, const JudgeDelta& delta);

/// Incremental distance reward: potential(prev) - potential(next).
double incremental_reward(const DeficitState& prev, const DeficitState& next);

/// Negated distance, kept as a diagnostic baseline. Always <= 0.
double absolute_reward(const DeficitState& state);

/// Axis with the largest deficit magnitude; ties resolve x, then y, then z.
Axis dominant_axis(const DeficitState& state);

}  // namespace mapo
