"""Per-step reward-shaping protocols and agent compliance models.

The difference-exchange protocol, the fixed-token protocol, inequity
aversion, and a pass-through baseline all operate on the same exchange
input: one step's modified rewards, epoch averages, advantage gates and
neighborhoods. Exchanges run as two synchronous phases (requests, then
responses) evaluated centrally per step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .games import COOPERATE, DEFECT, PayoffMatrix


class ProtocolKind(Enum):
    NAIVE = "naive"
    DRIVE = "drive"
    MATE = "mate"
    IA = "ia"


@dataclass(frozen=True)
class ComplianceProfile:
    """How faithfully an agent plays the exchange protocol.

    misreport, when set, distorts outgoing response values: ("offset", d)
    adds d, ("override", v) replaces the value with v.
    """

    sends_requests: bool = True
    sends_responses: bool = True
    misreport: tuple[str, float] | None = None

    def distort(self, value: float) -> float:
        if self.misreport is None:
            return value
        mode, amount = self.misreport
        if mode == "offset":
            return value + amount
        if mode == "override":
            return amount
        raise ValueError(f"unknown misreport mode {mode!r}")


FULL_COMPLIANCE = ComplianceProfile()


@dataclass
class ExchangeInput:
    """One timestep of protocol state for all agents.

    td_ok is the request gate (advantage residual non-negative); td holds
    the residual values themselves where a protocol needs magnitudes
    (token acceptance checks). Neighborhoods must exclude self.
    """

    u_hat: list[float]
    u_bar: list[float]
    td_ok: list[bool]
    neighborhoods: list[set[int]]
    compliance: list[ComplianceProfile] | None = None
    td: list[float] | None = None

    def __post_init__(self):
        n = len(self.u_hat)
        if self.compliance is None:
            self.compliance = [FULL_COMPLIANCE] * n
        if self.td is None:
            self.td = [0.0] * n
        for i, nbrs in enumerate(self.neighborhoods):
            if i in nbrs:
                raise ValueError(f"neighborhood of agent {i} contains itself")

    @property
    def n(self) -> int:
        return len(self.u_hat)


@dataclass
class ExchangeTrace:
    """Messages and outcome of one exchange round."""

    shaped: list[float]
    requests: list[tuple[int, float]] = field(default_factory=list)
    responses: list[tuple[int, int, float]] = field(default_factory=list)  # (from, to, value)
    anomalies: list[str] = field(default_factory=list)


def td_residual(value_fn, obs_t, obs_t1, u_hat: float, gamma: float) -> float:
    """Advantage residual: u + gamma * V(next) - V(current)."""
    return u_hat + gamma * value_fn(obs_t1) - value_fn(obs_t)


def update_epoch_average(u_bar: float, u_hat: float, t: int) -> float:
    """Running mean over the steps seen so far in the epoch (t is 0-based)."""
    if t < 0:
        raise ValueError("step index must be non-negative")
    return (t * u_bar + u_hat) / (t + 1)


def drive_exchange(inp: ExchangeInput) -> ExchangeTrace:
    """Two-phase difference exchange.

    Gated agents send their reward as a request to all neighbors; every
    responding neighbor answers with the difference between its own epoch
    average and the request. Each agent is then shaped by subtracting the
    smallest difference it handed out and adding the smallest difference
    it received, with zero defaults when either side is empty.
    """
    n = inp.n
    requests = [
        (i, inp.u_hat[i])
        for i in range(n)
        if inp.td_ok[i] and inp.compliance[i].sends_requests
    ]
    requesters = {i for i, _ in requests}
    responses: list[tuple[int, int, float]] = []
    sent_deltas: list[list[float]] = [[] for _ in range(n)]
    received_deltas: list[list[float]] = [[] for _ in range(n)]
    for i, value in requests:
        for j in inp.neighborhoods[i]:
            if not inp.compliance[j].sends_responses:
                continue
            delta = inp.compliance[j].distort(inp.u_bar[j] - value)
            sent_deltas[j].append(delta)
            received_deltas[i].append(delta)
            responses.append((j, i, delta))

    shaped = []
    anomalies = []
    for i in range(n):
        given = min(sent_deltas[i]) if sent_deltas[i] else 0.0
        if i in requesters:
            if received_deltas[i]:
                gained = min(received_deltas[i])
            else:
                gained = 0.0
                anomalies.append(f"agent {i} requested but received no responses")
        else:
            gained = 0.0
        shaped.append(inp.u_hat[i] - given + gained)
    return ExchangeTrace(shaped, requests, responses, anomalies)


def mate_exchange(inp: ExchangeInput, token: float) -> ExchangeTrace:
    """Two-phase fixed-token exchange.

    Gated agents send the token to all neighbors. A responding receiver
    keeps the token iff its residual still clears zero with the token
    added, and acknowledges (returning the token) only when its own gate
    is open too; a request that earns no acknowledgment costs the
    requester one token.
    """
    if token <= 0:
        raise ValueError(f"token must be positive, got {token}")
    n = inp.n
    shaped = list(inp.u_hat)
    requests = []
    responses = []
    anomalies = []
    for i in range(n):
        if not (inp.td_ok[i] and inp.compliance[i].sends_requests):
            continue
        requests.append((i, token))
        for j in inp.neighborhoods[i]:
            acknowledged = False
            if inp.compliance[j].sends_responses:
                if inp.td[j] + token >= 0.0:
                    shaped[j] += token
                    if inp.td_ok[j]:
                        acknowledged = True
                        responses.append((j, i, token))
            if acknowledged:
                shaped[i] += token
            else:
                shaped[i] -= token
    return ExchangeTrace(shaped, requests, responses, anomalies)


def ia_shape(u_hat: list[float], alpha: float, beta: float) -> list[float]:
    """Inequity-aversion shaping over instantaneous rewards.

    Each agent pays alpha per unit of disadvantage and beta per unit of
    advantage relative to every other agent, averaged over the n-1 peers.
    """
    n = len(u_hat)
    if n < 2:
        raise ValueError("inequity aversion needs at least two agents")
    shaped = []
    for i in range(n):
        disadvantage = sum(max(u_hat[j] - u_hat[i], 0.0) for j in range(n) if j != i)
        advantage = sum(max(u_hat[i] - u_hat[j], 0.0) for j in range(n) if j != i)
        shaped.append(u_hat[i] - (alpha * disadvantage + beta * advantage) / (n - 1))
    return shaped


def stage_exchange_input(
    m: PayoffMatrix,
    profile: tuple[str, str],
    compliance: tuple[ComplianceProfile, ComplianceProfile] = (FULL_COMPLIANCE, FULL_COMPLIANCE),
) -> ExchangeInput:
    """Steady-state exchange input for one 2-player stage-game step.

    Epoch averages equal the instantaneous profile payoffs, and the
    request gate opens for an agent doing at least as well as the
    mutual-cooperation baseline: both agents under mutual cooperation,
    only the defector under unilateral defection, neither under mutual
    defection.
    """
    u = list(m.cell(*profile))
    td_ok = [u[0] >= m.reward, u[1] >= m.reward]
    return ExchangeInput(
        u_hat=u,
        u_bar=list(u),
        td_ok=td_ok,
        neighborhoods=[{1}, {0}],
        compliance=list(compliance),
    )


def simulate_pd_exchange(
    m: PayoffMatrix,
    profile: tuple[str, str],
    compliance: tuple[ComplianceProfile, ComplianceProfile] = (FULL_COMPLIANCE, FULL_COMPLIANCE),
) -> tuple[float, float]:
    """Shaped payoff pair for one difference-exchange round at steady state."""
    trace = drive_exchange(stage_exchange_input(m, profile, compliance))
    return trace.shaped[0], trace.shaped[1]


def mate_stage_matrix(m: PayoffMatrix, token: float) -> PayoffMatrix:
    """Stage matrix realized by running the token exchange on every profile."""
    r = mate_exchange(stage_exchange_input(m, (COOPERATE, COOPERATE)), token).shaped[0]
    p = mate_exchange(stage_exchange_input(m, (DEFECT, DEFECT)), token).shaped[0]
    t, s = mate_exchange(stage_exchange_input(m, (DEFECT, COOPERATE)), token).shaped
    return PayoffMatrix(reward=r, punishment=p, temptation=t, sucker=s)


def shaped_rewards(
    kind: ProtocolKind,
    inp: ExchangeInput,
    token: float = 1.0,
    alpha: float = 5.0,
    beta: float = 0.05,
) -> ExchangeTrace:
    """Dispatch one step of reward shaping for the configured protocol."""
    if kind is ProtocolKind.NAIVE:
        return ExchangeTrace(list(inp.u_hat))
    if kind is ProtocolKind.DRIVE:
        return drive_exchange(inp)
    if kind is ProtocolKind.MATE:
        return mate_exchange(inp, token)
    if kind is ProtocolKind.IA:
        return ExchangeTrace(ia_shape(inp.u_hat, alpha, beta))
    raise ValueError(f"unknown protocol {kind!r}")
