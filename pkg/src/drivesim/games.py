"""Closed-form analysis of 2x2 and graphical social dilemmas.

Everything in here is exact arithmetic on small games: dilemma
classification, the payoff reshaping induced by each incentive protocol,
affine reward maps, pure Nash enumeration, and dominating-set checks on
communication graphs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

COOPERATE = "C"
DEFECT = "D"
ACTIONS = (COOPERATE, DEFECT)


class GameClass(Enum):
    """Classification of a symmetric 2x2 payoff matrix."""

    ITERATED_PD = "iterated_pd"
    STRICT_PD = "strict_pd"
    NOT_PD = "not_pd"


@dataclass(frozen=True)
class PayoffMatrix:
    """Symmetric 2x2 social-dilemma payoffs for the row player.

    reward      R: mutual cooperation
    punishment  P: mutual defection
    temptation  T: unilateral defection
    sucker      S: unilateral cooperation
    """

    reward: float
    punishment: float
    temptation: float
    sucker: float

    def __post_init__(self):
        for name in ("reward", "punishment", "temptation", "sucker"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"payoff {name!r} must be finite, got {v}")

    def row_payoff(self, own: str, other: str) -> float:
        """Payoff to a player choosing `own` against an opponent's `other`."""
        if own == COOPERATE:
            return self.reward if other == COOPERATE else self.sucker
        return self.temptation if other == COOPERATE else self.punishment

    def cell(self, a1: str, a2: str) -> tuple[float, float]:
        """(player-1 payoff, player-2 payoff) for the joint action (a1, a2)."""
        return self.row_payoff(a1, a2), self.row_payoff(a2, a1)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.temptation, self.reward, self.punishment, self.sucker)


@dataclass(frozen=True)
class AffineChange:
    """Per-epoch affine reward map u -> scale * u + shift."""

    scale: float
    shift: float
    epoch: int = 0

    def __call__(self, value: float) -> float:
        return self.scale * value + self.shift

    @property
    def degenerate(self) -> bool:
        """Scale so close to zero that payoff orderings collapse."""
        return abs(self.scale) < 1e-6


def classify(m: PayoffMatrix) -> GameClass:
    """Classify a matrix by the strict dilemma inequalities.

    T > R > P > S is a strict PD; 2R > T + S additionally makes it an
    iterated PD. Any tie fails the strict ordering and yields NOT_PD.
    """
    t, r, p, s = m.as_tuple()
    if not (t > r > p > s):
        return GameClass.NOT_PD
    if 2.0 * r > t + s:
        return GameClass.ITERATED_PD
    return GameClass.STRICT_PD


def is_pd(m: PayoffMatrix) -> bool:
    return classify(m) is not GameClass.NOT_PD


def apply_affine(m: PayoffMatrix, f: AffineChange) -> PayoffMatrix:
    """Map every payoff entry through the affine change."""
    return PayoffMatrix(
        reward=f(m.reward),
        punishment=f(m.punishment),
        temptation=f(m.temptation),
        sucker=f(m.sucker),
    )


def shape_drive(m: PayoffMatrix) -> PayoffMatrix:
    """Stage-game effect of a truthful difference exchange: T and S swap.

    Mutual cooperation and mutual defection are untouched because the
    exchanged differences are zero there; under unilateral defection the
    defector ends up with the sucker payoff and the exploited player with
    the temptation payoff.
    """
    return PayoffMatrix(
        reward=m.reward,
        punishment=m.punishment,
        temptation=m.sucker,
        sucker=m.temptation,
    )


def shape_ia(m: PayoffMatrix, alpha: float, beta: float) -> PayoffMatrix:
    """Inequity-aversion reshaping of the 2-player matrix.

    Each payoff u_i becomes u_i - alpha*max(u_j - u_i, 0) - beta*max(u_i - u_j, 0).
    Symmetric cells (CC, DD) are unchanged; the result is again symmetric,
    so a single row-player matrix describes both players.
    """
    if alpha < 0 or beta < 0:
        raise ValueError("inequity coefficients must be non-negative")
    gap = m.temptation - m.sucker
    return PayoffMatrix(
        reward=m.reward,
        punishment=m.punishment,
        temptation=m.temptation - beta * max(gap, 0.0) - alpha * max(-gap, 0.0),
        sucker=m.sucker - alpha * max(gap, 0.0) - beta * max(-gap, 0.0),
    )


def shape_mate(m: PayoffMatrix, token: float) -> PayoffMatrix:
    """Fixed-token reshaping: mutual requests pay out, lone requests cost.

    CC cells gain two tokens each (request accepted + acknowledgment),
    the unilateral defector loses one token (unacknowledged request), the
    exploited player keeps the received token, and DD is unchanged.
    """
    if token <= 0:
        raise ValueError(f"token must be positive, got {token}")
    return PayoffMatrix(
        reward=m.reward + 2.0 * token,
        punishment=m.punishment,
        temptation=m.temptation - token,
        sucker=m.sucker + token,
    )


def mate_min_token(m: PayoffMatrix) -> float:
    """Smallest token that makes cooperation dominant after `shape_mate`.

    Equals max{P - S, (T - R) / 3}: the first term makes the exploited
    player prefer C against D, the second makes CC beat the shaved
    temptation payoff.
    """
    if classify(m) is GameClass.NOT_PD:
        raise ValueError("token threshold is only defined for strict PDs")
    return max(m.punishment - m.sucker, (m.temptation - m.reward) / 3.0)


def dominant_action(m: PayoffMatrix) -> str | None:
    """Strictly dominant action of the symmetric game, if any."""
    c_beats_d = m.reward > m.temptation and m.sucker > m.punishment
    d_beats_c = m.temptation > m.reward and m.punishment > m.sucker
    if c_beats_d:
        return COOPERATE
    if d_beats_c:
        return DEFECT
    return None


def pure_nash_2x2(m: PayoffMatrix) -> set[tuple[str, str]]:
    """All pure profiles where no unilateral deviation strictly improves."""
    equilibria = set()
    for a1, a2 in itertools.product(ACTIONS, repeat=2):
        u1, u2 = m.cell(a1, a2)
        d1 = m.row_payoff(_flip(a1), a2)
        d2 = m.row_payoff(_flip(a2), a1)
        if u1 >= d1 and u2 >= d2:
            equilibria.add((a1, a2))
    return equilibria


def _flip(action: str) -> str:
    return DEFECT if action == COOPERATE else COOPERATE


class Graph:
    """Small undirected graph used as a communication topology."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise ValueError("node count must be non-negative")
        self.n = n
        self._adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            self._adj[u].add(v)
            self._adj[v].add(u)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, itertools.combinations(range(n), 2))

    @classmethod
    def from_edge_list(cls, text: str) -> "Graph":
        """Parse `u v` pairs, one per line; node count = max index + 1."""
        edges = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            u, v = (int(tok) for tok in line.split())
            edges.append((u, v))
        n = max((max(u, v) for u, v in edges), default=-1) + 1
        return cls(n, edges)

    def neighbors(self, i: int) -> set[int]:
        return self._adj[i]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self._adj[u] if u < v]

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in self._adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.n


def graphical_payoff(
    g: Graph, m: PayoffMatrix, profile: Sequence[str], shaped: bool = False
) -> list[float]:
    """Per-agent payoff: sum of pairwise stage games over incident edges."""
    if len(profile) != g.n:
        raise ValueError(f"profile length {len(profile)} != node count {g.n}")
    mat = shape_drive(m) if shaped else m
    payoffs = [0.0] * g.n
    for i in range(g.n):
        for j in g.neighbors(i):
            payoffs[i] += mat.row_payoff(profile[i], profile[j])
    return payoffs


def enumerate_pure_nash(
    g: Graph, m: PayoffMatrix, shaped: bool = False, max_nodes: int = 20
) -> set[tuple[str, ...]]:
    """Exhaustive pure-equilibrium search over all 2^N action profiles.

    A profile survives iff no agent gains strictly by flipping its action,
    judged by the summed pairwise payoff difference over its neighbors.
    """
    if g.n > max_nodes:
        raise ValueError(f"graph too large for enumeration: {g.n} > {max_nodes}")
    mat = shape_drive(m) if shaped else m
    pay = {
        (COOPERATE, COOPERATE): mat.reward,
        (COOPERATE, DEFECT): mat.sucker,
        (DEFECT, COOPERATE): mat.temptation,
        (DEFECT, DEFECT): mat.punishment,
    }
    nbrs = [tuple(g.neighbors(i)) for i in range(g.n)]
    equilibria = set()
    for profile in itertools.product(ACTIONS, repeat=g.n):
        stable = True
        for i in range(g.n):
            own = profile[i]
            alt = _flip(own)
            gain = 0.0
            for j in nbrs[i]:
                other = profile[j]
                gain += pay[(alt, other)] - pay[(own, other)]
            if gain > 0.0:
                stable = False
                break
        if stable:
            equilibria.add(profile)
    return equilibria


def is_dominating_set(g: Graph, compliant: set[int], mode: str = "total") -> bool:
    """Whether `compliant` covers the graph for defector penalization.

    mode="total": every node, compliant ones included, needs a compliant
    neighbor (a node does not cover itself). mode="requesters": compliant
    nodes count as covered, only the rest need a compliant neighbor.
    """
    if mode not in ("total", "requesters"):
        raise ValueError(f"unknown domination mode {mode!r}")
    for i in range(g.n):
        if mode == "requesters" and i in compliant:
            continue
        if not (g.neighbors(i) & compliant):
            return False
    return True


def domination_number(g: Graph, mode: str = "total", max_nodes: int = 20) -> int:
    """Minimum size of a dominating set, by brute force over subsets."""
    if g.n == 0:
        raise ValueError("domination number of the empty graph is undefined")
    if g.n > max_nodes:
        raise ValueError(f"graph too large for enumeration: {g.n} > {max_nodes}")
    nodes = range(g.n)
    for k in range(0, g.n + 1):
        for subset in itertools.combinations(nodes, k):
            if is_dominating_set(g, set(subset), mode):
                return k
    raise ValueError(f"no {mode} dominating set exists (isolated node)")


def random_strict_pd(
    rng: np.random.Generator, iterated: bool = False, low: float = -10.0, high: float = 10.0
) -> PayoffMatrix:
    """Sample a strict PD: four distinct uniforms sorted into T > R > P > S.

    With iterated=True, resample until 2R > T + S also holds.
    """
    while True:
        vals = np.sort(rng.uniform(low, high, size=4))[::-1]
        if len(np.unique(vals)) < 4:
            continue
        t, r, p, s = (float(v) for v in vals)
        m = PayoffMatrix(reward=r, punishment=p, temptation=t, sucker=s)
        if iterated and classify(m) is not GameClass.ITERATED_PD:
            continue
        return m
