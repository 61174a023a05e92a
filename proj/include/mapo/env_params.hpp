// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace mapo {

/// Dialogue simulator parameters. Defaults give a 15-turn horizon and a
/// 5-turn regression limit.
struct EnvParams {
  double effectiveness = 0.5;   // fraction of the targeted deficit removed, in (0, 1)
  double noise_std = 0.05;      // judge noise, >= 0
  double frustration = 0.2;     // dominant-axis increase on a mismatched action, >= 0
  double repeat_decay = 0.7;    // per-repetition effectiveness decay, in (0, 1]
  double success_epsilon = 0.3;
  int fail_streak = 5;
  int max_turns = 15;
  double init_max = 3.0;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

}  // namespace mapo
