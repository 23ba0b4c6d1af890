"""Empirical stage-game matrices for the gridworld dilemmas.

Scripted cooperate/defect behavior pairs are rolled out and the
per-step expected rewards form a 2x2 payoff matrix that should classify
as a strict dilemma.
"""

from __future__ import annotations

import numpy as np

from ..games import PayoffMatrix
from .harvest import TAG_DIRS, TAG_LENGTH, TAG_WIDTH, HarvestCommons


def coin2_expected_matrix(
    rng: np.random.Generator, min_pickups: int = 100_000
) -> tuple[PayoffMatrix, int]:
    """Per-step payoff matrix of 2-agent coin collecting.

    Uses the pickup-saturated abstraction behind the per-step accounting:
    every step each agent is offered one coin of uniform random color, a
    cooperator takes only matching coins, a defector takes anything and
    also sweeps a coin its partner declined. A mismatched pickup costs
    the matching-color agent 2. Expected per-step values are R=0.5, P=0,
    T=1.5, S=-0.5.
    """
    totals = {}
    pickups = 0
    for pair in (("C", "C"), ("D", "D"), ("D", "C")):
        reward_sum = np.zeros(2)
        steps = 0
        pair_pickups = 0
        while pair_pickups < min_pickups:
            offered = rng.integers(0, 2, size=2)
            declined = [False, False]
            for i, policy in enumerate(pair):
                if policy == "D" or offered[i] == i:
                    reward_sum[i] += 1.0
                    pair_pickups += 1
                    if offered[i] != i:
                        reward_sum[offered[i]] -= 2.0
                else:
                    declined[i] = True
            for i, policy in enumerate(pair):
                j = 1 - i
                if policy == "D" and declined[j]:
                    # a declined coin mismatches its decliner, so it matches
                    # the sweeping defector and carries no penalty
                    reward_sum[i] += 1.0
                    pair_pickups += 1
            steps += 1
        totals[pair] = reward_sum / steps
        pickups += pair_pickups
    return (
        PayoffMatrix(
            reward=float(totals[("C", "C")][0]),
            punishment=float(totals[("D", "D")][0]),
            temptation=float(totals[("D", "C")][0]),
            sucker=float(totals[("D", "C")][1]),
        ),
        pickups,
    )


PROBE_MAP = """\
..........
...@@@....
..@@@@@...
.@@@@@@@..
..@@@@@...
...@@@....
..........
"""

# steeper than the environment default so total depletion is properly
# costly on the small probe map (many empty low-density cells would
# otherwise out-regrow the preserved cluster)
PROBE_REGROWTH = ((0, 0.0), (1, 0.005), (3, 0.03), (6, 0.1))


def _nearest_apple_move(env: HarvestCommons, i: int) -> int:
    """Step toward the closest live apple (rows first), or wait."""
    r, c = env.positions[i]
    rows, cols = np.where(env.apples)
    if len(rows) == 0:
        return 0
    dists = np.abs(rows - r) + np.abs(cols - c)
    k = int(np.argmin(dists))
    tr, tc = int(rows[k]), int(cols[k])
    if tr < r:
        return 1
    if tr > r:
        return 2
    if tc < c:
        return 3
    if tc > c:
        return 4
    return 0


def _tag_direction(env: HarvestCommons, tagger: int, target: int) -> int | None:
    r0, c0 = env.positions[tagger]
    rel = env.positions[target] - (r0, c0)
    for action, (dr, dc) in TAG_DIRS.items():
        ahead = rel[0] * dr + rel[1] * dc
        side = abs(rel[0] * dc - rel[1] * dr)
        if 1 <= ahead <= TAG_LENGTH and side <= TAG_WIDTH // 2:
            return action
    return None


def _scripted_action(env: HarvestCommons, i: int, policy: str, reserve: int) -> int:
    if policy == "D":
        j = 1 - i
        if env.freeze[j] == 0:
            tag = _tag_direction(env, i, j)
            if tag is not None:
                return tag
        return _nearest_apple_move(env, i)
    if env.apple_count > reserve:
        return _nearest_apple_move(env, i)
    return 0


def harvest2_expected_matrix(
    rng: np.random.Generator, episodes: int = 40, horizon: int = 150, reserve: int = 16
) -> PayoffMatrix:
    """Per-step payoff matrix of a 2-agent harvest.

    Cooperators harvest only while the live-apple stock stays above a
    reserve and never tag; defectors tag whenever the opponent is in
    beam range and harvest everything.
    """
    env = HarvestCommons(
        n_agents=2, horizon=horizon, map_text=PROBE_MAP, regrowth_table=PROBE_REGROWTH
    )
    means = {}
    for pair in (("C", "C"), ("D", "D"), ("D", "C")):
        reward_sum = np.zeros(2)
        for _ in range(episodes):
            env.reset(rng)
            for _ in range(horizon):
                actions = [_scripted_action(env, i, pair[i], reserve) for i in range(2)]
                step = env.step(actions, rng)
                reward_sum += step.rewards
        means[pair] = reward_sum / (episodes * horizon)
    return PayoffMatrix(
        reward=float(means[("C", "C")][0]),
        punishment=float(means[("D", "D")][0]),
        temptation=float(means[("D", "C")][0]),
        sucker=float(means[("D", "C")][1]),
    )
