// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#include "mapo/empathy_state.hpp"

#include <cmath>
#include <string>

#include "mapo/errors.hpp"

namespace mapo {

const char* axis_name(Axis axis) {
  switch (axis) {
    case Axis::Cognitive: return "cognitive";
    case Axis::Affective: return "affective";
    case Axis::Proactive: return "proactive";
  }
  return "unknown";
}

DeficitState::DeficitState(double x, double y, double z) : v_{x, y, z} {
  for (double c : v_) {
    if (!std::isfinite(c)) throw InvalidStateError("deficit state has a non-finite component");
  }
}

JudgeDelta::JudgeDelta(double dx, double dy, double dz) : v_{dx, dy, dz} {
  for (double c : v_) {
    if (!std::isfinite(c) || std::abs(c) >= kBound) {
      throw DomainError("judge delta component " + std::to_string(c) + " outside (-2, 2)");
    }
  }
}

double potential(const DeficitState& state) {
  return std::hypot(state.x(), state.y(), state.z());
}

DeficitState apply_delta(const DeficitState& state, const JudgeDelta& delta) {
  return DeficitState(state.x() + delta.dx(), state.y() + delta.dy(), state.z() + delta.dz());
}

double incremental_reward(const DeficitState& prev, const DeficitState& next) {
  return potential(prev) - potential(next);
}

double absolute_reward(const DeficitState& state) { return -potential(state); }

Axis dominant_axis(const DeficitState& state) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kNumAxes; ++i) {
    if (std::abs(state[i]) > std::abs(state[best])) best = i;
  }
  return static_cast<Axis>(best);
}

}  // namespace mapo
