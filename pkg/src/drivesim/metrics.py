"""Cooperation measures over original (unmodified) environmental rewards.

All metrics consume the episode log of raw rewards and event flags, so
they are untouched by the external reward-change schedule and by any
incentive protocol.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class EpisodeLog:
    """Raw per-step record for one episode.

    rewards: (steps, agents) original environmental rewards
    joint_actions: (steps, agents) action indices
    frozen: (steps, agents) bool, agent was timed-out that step
    collected_own / collected_other: (steps, agents) bool coin pickups
    """

    rewards: np.ndarray
    joint_actions: np.ndarray | None = None
    frozen: np.ndarray | None = None
    collected_own: np.ndarray | None = None
    collected_other: np.ndarray | None = None

    @property
    def horizon(self) -> int:
        return self.rewards.shape[0]

    @property
    def n_agents(self) -> int:
        return self.rewards.shape[1]


def social_welfare(log: EpisodeLog) -> float:
    """Undiscounted sum of all agents' rewards over the episode."""
    return float(log.rewards.sum())


def equality(log: EpisodeLog) -> float:
    """One minus the Gini coefficient of per-agent reward totals.

    Undefined (NaN) when total welfare is not positive, which happens in
    environments with mostly negative rewards.
    """
    totals = log.rewards.sum(axis=0)
    grand = totals.sum()
    if grand <= 0.0:
        return float("nan")
    n = log.n_agents
    spread = float(np.abs(totals[:, None] - totals[None, :]).sum())
    return 1.0 - spread / (2.0 * n * grand)


def sustainability(log: EpisodeLog) -> float:
    """Mean timestep of positive-reward events, averaged over agents.

    Agents that never earn a positive reward contribute 0.
    """
    chis = []
    for i in range(log.n_agents):
        steps = np.nonzero(log.rewards[:, i] > 0.0)[0]
        chis.append(float(steps.mean()) if len(steps) else 0.0)
    return float(np.mean(chis))


def peace(log: EpisodeLog) -> float:
    """Average number of agents per step that are not timed out."""
    if log.frozen is None:
        return float(log.n_agents)
    return log.n_agents - float(log.frozen.sum()) / log.horizon


def cooperation_rate(log: EpisodeLog) -> float:
    """Fraction of steps where every agent played action 0 (cooperate)."""
    if log.joint_actions is None:
        raise ValueError("episode log has no joint actions")
    return float(np.all(log.joint_actions == 0, axis=1).mean())


def own_coin_counts(log: EpisodeLog) -> tuple[int, int]:
    """(own-color pickups, total pickups) for the episode."""
    if log.collected_own is None or log.collected_other is None:
        raise ValueError("episode log has no coin pickup events")
    own = int(log.collected_own.sum())
    return own, own + int(log.collected_other.sum())


def own_coin_rate(log: EpisodeLog) -> float:
    """Share of collected coins matching the collector's color."""
    own, total = own_coin_counts(log)
    return own / total if total else float("nan")
