"""Commons harvest: apples regrow by local density, agents can tag.

Apples pay +1, every agent pays 0.01 per step, and a tagged agent is
frozen for the next 25 steps. Regrowth probability per empty apple cell
depends on live apples within Chebyshev radius 2, so a fully depleted
field never recovers within an episode.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .base import Environment, EnvStep

MOVES = {1: (-1, 0), 2: (1, 0), 3: (0, -1), 4: (0, 1)}  # N, S, W, E
TAG_DIRS = {5: (-1, 0), 6: (1, 0), 7: (0, -1), 8: (0, 1)}

TAG_FREEZE_STEPS = 25
TAG_LENGTH = 5
TAG_WIDTH = 5
STEP_PENALTY = -0.01
VIEW_RADIUS = 3  # 7x7 window

# respawn probability keyed by live-apple count in the 5x5 neighborhood
DEFAULT_REGROWTH = ((0, 0.0), (1, 0.01), (3, 0.05), (6, 0.1))


def load_default_map() -> str:
    return resources.files("drivesim.envs.maps").joinpath("default_harvest.txt").read_text()


def parse_map(text: str) -> tuple[np.ndarray, np.ndarray]:
    """ASCII map -> (walls, apple-capable) boolean grids."""
    lines = [line for line in text.splitlines() if line]
    widths = {len(line) for line in lines}
    if len(widths) != 1:
        raise ValueError(f"ragged map rows: widths {sorted(widths)}")
    bad = {ch for line in lines for ch in line} - {"@", ".", "#"}
    if bad:
        raise ValueError(f"unknown map characters: {sorted(bad)}")
    grid = np.array([list(line) for line in lines])
    return grid == "#", grid == "@"


class HarvestCommons(Environment):
    def __init__(
        self,
        n_agents: int = 12,
        horizon: int = 250,
        gamma: float = 0.99,
        map_text: str | None = None,
        regrowth_table=DEFAULT_REGROWTH,
    ):
        self.walls, self.capable = parse_map(map_text or load_default_map())
        self.rows, self.cols = self.walls.shape
        free = int((~self.walls & ~self.capable).sum())
        if free < n_agents:
            raise ValueError(f"map has only {free} spawn cells for {n_agents} agents")
        self.n_agents = n_agents
        self.n_actions = 9
        self.obs_size = 3 * (2 * VIEW_RADIUS + 1) ** 2
        self.horizon = horizon
        self.gamma = gamma
        self.regrowth_table = tuple(sorted(regrowth_table))
        self._t = 0
        self.apples = self.capable.copy()
        self.positions = np.zeros((n_agents, 2), dtype=int)
        self.freeze = np.zeros(n_agents, dtype=int)
        self._wall_pad = np.pad(self.walls, VIEW_RADIUS, constant_values=True).astype(float)

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        self._t = 0
        self.apples = self.capable.copy()
        self.freeze[:] = 0
        spawn_r, spawn_c = np.where(~self.walls & ~self.capable)
        picks = rng.choice(len(spawn_r), size=self.n_agents, replace=False)
        self.positions = np.stack([spawn_r[picks], spawn_c[picks]], axis=1)
        return self._observations()

    def neighborhoods(self) -> list[set[int]]:
        gaps = np.abs(self.positions[:, None, :] - self.positions[None, :, :]).max(axis=2)
        near = gaps <= VIEW_RADIUS
        np.fill_diagonal(near, False)
        return [set(np.nonzero(row)[0].tolist()) for row in near]

    def _regrow_prob(self, k: int) -> float:
        prob = 0.0
        for threshold, p in self.regrowth_table:
            if k >= threshold:
                prob = p
        return prob

    def step(self, actions, rng: np.random.Generator) -> EnvStep:
        self._check_actions(actions)
        if self._t >= self.horizon:
            raise RuntimeError("episode is already terminal")
        frozen_now = self.freeze > 0

        for i in rng.permutation(self.n_agents):
            if self.freeze[i] > 0:
                continue
            a = actions[i]
            if a in MOVES:
                r, c = self.positions[i] + MOVES[a]
                if 0 <= r < self.rows and 0 <= c < self.cols and not self.walls[r, c]:
                    self.positions[i] = (r, c)
            elif a in TAG_DIRS:
                for j in self._beam_hits(i, TAG_DIRS[a]):
                    self.freeze[j] = TAG_FREEZE_STEPS + 1  # decremented below

        rewards = np.full(self.n_agents, STEP_PENALTY)
        for i in rng.permutation(self.n_agents):
            r, c = self.positions[i]
            if self.apples[r, c]:
                self.apples[r, c] = False
                rewards[i] += 1.0

        self._regrow(rng)
        self.freeze = np.maximum(self.freeze - 1, 0)
        self._t += 1
        return EnvStep(
            rewards=rewards,
            observations=self._observations(),
            neighborhoods=self.neighborhoods(),
            terminal=self._t >= self.horizon,
            frozen=frozen_now,
        )

    def _beam_hits(self, tagger: int, direction: tuple[int, int]) -> list[int]:
        r0, c0 = self.positions[tagger]
        dr, dc = direction
        half = TAG_WIDTH // 2
        hits = []
        for j in range(self.n_agents):
            if j == tagger:
                continue
            rel_r, rel_c = self.positions[j] - (r0, c0)
            ahead = rel_r * dr + rel_c * dc  # distance along the beam
            side = abs(rel_r * dc - rel_c * dr)  # offset across it
            if 1 <= ahead <= TAG_LENGTH and side <= half:
                hits.append(j)
        return hits

    def _regrow(self, rng: np.random.Generator) -> None:
        live = self.apples.astype(int)
        padded = np.pad(live, 2)
        counts = sum(
            padded[2 + dr : 2 + dr + self.rows, 2 + dc : 2 + dc + self.cols]
            for dr in range(-2, 3)
            for dc in range(-2, 3)
        ) - live
        occupied = np.zeros_like(self.apples)
        occupied[self.positions[:, 0], self.positions[:, 1]] = True
        cand_r, cand_c = np.where(self.capable & ~self.apples & ~occupied)
        if len(cand_r) == 0:
            return
        draws = rng.random(len(cand_r))
        for idx in range(len(cand_r)):
            p = self._regrow_prob(int(counts[cand_r[idx], cand_c[idx]]))
            if p > 0.0 and draws[idx] < p:
                self.apples[cand_r[idx], cand_c[idx]] = True

    def _observations(self) -> np.ndarray:
        side = 2 * VIEW_RADIUS + 1
        cells = side * side
        apple_pad = np.pad(self.apples, VIEW_RADIUS, constant_values=False).astype(float)
        counts = np.zeros((self.rows + 2 * VIEW_RADIUS, self.cols + 2 * VIEW_RADIUS))
        np.add.at(counts, (self.positions[:, 0] + VIEW_RADIUS, self.positions[:, 1] + VIEW_RADIUS), 1.0)
        obs = np.zeros((self.n_agents, self.obs_size))
        for i in range(self.n_agents):
            r, c = self.positions[i]
            window = (slice(r, r + side), slice(c, c + side))
            others = counts[window].copy()
            others[VIEW_RADIUS, VIEW_RADIUS] -= 1.0  # drop self from the count
            obs[i, :cells] = apple_pad[window].ravel()
            obs[i, cells : 2 * cells] = (others > 0).ravel()
            obs[i, 2 * cells :] = self._wall_pad[window].ravel()
        return obs

    @property
    def apple_count(self) -> int:
        return int(self.apples.sum())
