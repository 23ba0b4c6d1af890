"""Iterated prisoner's dilemma with the standard negative payoff instance."""

from __future__ import annotations

import numpy as np

from ..games import PayoffMatrix
from .base import Environment, EnvStep, all_others

ACTION_C, ACTION_D = 0, 1

# Payoffs: mutual cooperation -1, mutual defection -2, temptation 0, sucker -3.
DEFAULT_MATRIX = PayoffMatrix(reward=-1.0, punishment=-2.0, temptation=0.0, sucker=-3.0)


class IteratedPD(Environment):
    """Two agents, two actions; observations encode the previous joint action.

    Each agent sees a 4-dim two-hot vector (own previous action one-hot,
    then the opponent's), all zeros at the first step.
    """

    def __init__(self, horizon: int = 150, gamma: float = 0.95, matrix: PayoffMatrix = DEFAULT_MATRIX):
        if horizon < 1:
            raise ValueError("horizon must be at least 1")
        self.n_agents = 2
        self.n_actions = 2
        self.obs_size = 4
        self.horizon = horizon
        self.gamma = gamma
        self.matrix = matrix
        self.obs_space_hint = 5  # zero vector plus the four joint actions
        self._t = 0
        self._neighborhoods = all_others(2)

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        self._t = 0
        return np.zeros((2, 4))

    def neighborhoods(self) -> list[set[int]]:
        return self._neighborhoods

    def step(self, actions, rng: np.random.Generator) -> EnvStep:
        self._check_actions(actions)
        if self._t >= self.horizon:
            raise RuntimeError("episode is already terminal")
        names = ["C" if a == ACTION_C else "D" for a in actions]
        u1, u2 = self.matrix.cell(names[0], names[1])
        obs = np.zeros((2, 4))
        for i in range(2):
            obs[i, actions[i]] = 1.0
            obs[i, 2 + actions[1 - i]] = 1.0
        self._t += 1
        return EnvStep(
            rewards=np.array([u1, u2]),
            observations=obs,
            neighborhoods=self.neighborhoods(),
            terminal=self._t >= self.horizon,
        )
