"""Coin game: colored agents compete for a single colored coin.

Collecting any coin pays +1; collecting a mismatched coin costs the
agent of the coin's color -2. Simultaneous pickups are resolved by a
random agent order drawn from the run RNG, so exactly one agent collects
per step and the coin immediately respawns with a fresh random color at
a cell no agent occupies.
"""

from __future__ import annotations

import numpy as np

from .base import Environment, EnvStep, all_others

MOVES = ((-1, 0), (1, 0), (0, -1), (0, 1))  # N, S, W, E


class CoinGame(Environment):
    def __init__(
        self,
        n_agents: int = 2,
        grid: tuple[int, int] | None = None,
        horizon: int = 150,
        gamma: float = 0.95,
    ):
        if n_agents < 2:
            raise ValueError("coin game needs at least two agents")
        if grid is None:
            grid = (3, 3) if n_agents == 2 else (5, 5)
        self.n_agents = n_agents
        self.rows, self.cols = grid
        if self.rows * self.cols <= n_agents:
            raise ValueError("grid too small to place a coin off-agent")
        self.n_actions = 4
        self.obs_size = (n_agents + 2) * self.rows * self.cols
        self.horizon = horizon
        self.gamma = gamma
        self._t = 0
        self.positions = np.zeros((n_agents, 2), dtype=int)
        self.coin_pos = (0, 0)
        self.coin_color = 0
        self._neighborhoods = all_others(n_agents)
        if n_agents == 2:
            # self cell x other cell x coin cell x same/other color
            self.obs_space_hint = (self.rows * self.cols) ** 3 * 2

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        self._t = 0
        cells = self.rows * self.cols
        flat = rng.integers(0, cells, size=self.n_agents)
        self.positions = np.stack(divmod(flat, self.cols), axis=1)
        self._respawn_coin(rng)
        return self._observations()

    def _respawn_coin(self, rng: np.random.Generator) -> None:
        occupied = {(int(r), int(c)) for r, c in self.positions}
        free = [
            (r, c)
            for r in range(self.rows)
            for c in range(self.cols)
            if (r, c) not in occupied
        ]
        self.coin_pos = free[int(rng.integers(0, len(free)))]
        self.coin_color = int(rng.integers(0, self.n_agents))

    def neighborhoods(self) -> list[set[int]]:
        return self._neighborhoods

    def step(self, actions, rng: np.random.Generator) -> EnvStep:
        self._check_actions(actions)
        if self._t >= self.horizon:
            raise RuntimeError("episode is already terminal")
        for i, a in enumerate(actions):
            dr, dc = MOVES[a]
            r, c = self.positions[i] + (dr, dc)
            if 0 <= r < self.rows and 0 <= c < self.cols:
                self.positions[i] = (r, c)

        rewards = np.zeros(self.n_agents)
        own = np.zeros(self.n_agents, dtype=bool)
        other = np.zeros(self.n_agents, dtype=bool)
        on_coin = [
            i for i in range(self.n_agents) if tuple(self.positions[i]) == self.coin_pos
        ]
        if on_coin:
            rank = np.empty(self.n_agents, dtype=int)
            rank[rng.permutation(self.n_agents)] = np.arange(self.n_agents)
            collector = min(on_coin, key=lambda i: rank[i])
            rewards[collector] += 1.0
            if collector == self.coin_color:
                own[collector] = True
            else:
                other[collector] = True
                rewards[self.coin_color] -= 2.0
            self._respawn_coin(rng)

        self._t += 1
        return EnvStep(
            rewards=rewards,
            observations=self._observations(),
            neighborhoods=self.neighborhoods(),
            terminal=self._t >= self.horizon,
            collected_own=own,
            collected_other=other,
        )

    def _observations(self) -> np.ndarray:
        cells = self.rows * self.cols
        coin_flat = self.coin_pos[0] * self.cols + self.coin_pos[1]
        obs = np.zeros((self.n_agents, self.obs_size))
        for i in range(self.n_agents):
            planes = np.zeros((self.n_agents + 2, cells))
            planes[0, self.positions[i, 0] * self.cols + self.positions[i, 1]] = 1.0
            for slot, j in enumerate(j for j in range(self.n_agents) if j != i):
                planes[1 + slot, self.positions[j, 0] * self.cols + self.positions[j, 1]] = 1.0
            same = self.coin_color == i
            planes[-2 if same else -1, coin_flat] = 1.0
            obs[i] = planes.ravel()
        return obs
