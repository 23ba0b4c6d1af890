"""Common stepping interface for the sequential social dilemmas."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class EnvKind(Enum):
    IPD = "ipd"
    COIN = "coin"
    HARVEST = "harvest"


@dataclass
class EnvStep:
    """Result of one joint step.

    rewards are the original environmental rewards; events carry the
    per-agent episode bookkeeping the cooperation metrics need.
    """

    rewards: np.ndarray  # (n,)
    observations: np.ndarray  # (n, obs_dim)
    neighborhoods: list[set[int]]
    terminal: bool
    collected_own: np.ndarray | None = None  # (n,) bool, coin pickups
    collected_other: np.ndarray | None = None  # (n,) bool
    frozen: np.ndarray | None = None  # (n,) bool, tagged out this step


class Environment:
    """Stateful single-caller environment; all randomness from the run RNG."""

    n_agents: int
    n_actions: int
    obs_size: int
    horizon: int
    gamma: float
    # Distinct-observation bound, if small enough to memoize net forwards.
    obs_space_hint: int | None = None

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        """Start a new episode; returns initial observations (n, obs_dim)."""
        raise NotImplementedError

    def step(self, actions, rng: np.random.Generator) -> EnvStep:
        raise NotImplementedError

    def neighborhoods(self) -> list[set[int]]:
        """Current per-agent neighbor sets (self excluded)."""
        raise NotImplementedError

    def _check_actions(self, actions) -> None:
        if len(actions) != self.n_agents:
            raise ValueError(f"expected {self.n_agents} actions, got {len(actions)}")
        for a in actions:
            if not 0 <= a < self.n_actions:
                raise ValueError(f"action {a} out of range [0, {self.n_actions})")


def all_others(n: int) -> list[set[int]]:
    return [set(range(n)) - {i} for i in range(n)]
