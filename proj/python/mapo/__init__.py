# SPDX-FileCopyrightText: (c) 2026 The mapo authors
#
# SPDX-License-Identifier: Apache-2.0

"""Mixed-advantage policy gradient on a simulated empathy dialogue."""

from ._core import (
    FEATURE_DIM,
    NUM_ACTIONS,
    AdvantageConfig,
    EnvParams,
    MapoError,
    TrainConfig,
    alignment_score,
    batch_level_advantages,
    compute_advantages,
    compute_t_min,
    evaluate,
    incremental_reward,
    mc_returns,
    mixed_advantages,
    mixture_variance_formula,
    potential,
    rollout_group,
    run_episode,
    sample_scenario,
    train,
    turn_level_advantages,
)

__version__ = "0.1.0"
