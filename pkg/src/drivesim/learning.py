"""Independent policy-gradient learners with a learned value baseline.

Each agent trains a softmax policy and a value net on its own epoch of
experience. Returns are normalized per (agent, time index) across the
epoch's episodes before the update, which makes one epoch of learning
exactly invariant to any shared positive affine change of that epoch's
rewards: both scale and shift cancel in the normalized returns.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .nets import MLP, Adam, NetworkSpec, clip_global_norm, log_softmax, softmax

_STD_FLOOR = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    """Shared training hyperparameters."""

    lr: float = 0.001
    clip_norm: float = 1.0
    trace_lambda: float = 1.0
    gamma: float = 0.95
    episodes_per_epoch: int = 10
    epochs: int = 4000
    history_len: int = 1
    hidden: tuple[int, ...] = (64, 64)

    def __post_init__(self):
        if min(self.lr, self.clip_norm, self.episodes_per_epoch, self.epochs) <= 0:
            raise ValueError("lr, clip_norm, episodes_per_epoch and epochs must be positive")
        if not 0.0 <= self.trace_lambda <= 1.0:
            raise ValueError("trace_lambda must lie in [0, 1]")
        if self.trace_lambda != 1.0:
            raise ValueError("only the Monte-Carlo setting trace_lambda=1 is supported")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if self.history_len != 1:
            raise ValueError("only history length 1 (current observation) is supported")
        if len(self.hidden) < 1:
            raise ValueError("networks need at least one hidden layer")


@dataclass(frozen=True)
class ReturnStats:
    """Per-agent per-epoch return statistics (sample std, N-1 denominator)."""

    mean: float
    std: float

    def __post_init__(self):
        if self.std < 0:
            raise ValueError("standard deviation cannot be negative")


def compute_returns(rewards: np.ndarray, gamma: float) -> np.ndarray:
    """Discounted suffix sums for one episode's reward sequence."""
    rewards = np.asarray(rewards, dtype=np.float64)
    out = np.empty_like(rewards)
    acc = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        acc = rewards[t] + gamma * acc
        out[t] = acc
    return out


def normalize_returns(values) -> tuple[np.ndarray, ReturnStats]:
    """Shift and scale a pool of returns to sample mean 0 and std 1.

    Degenerate pools (zero sample standard deviation) map to all zeros so
    constant-reward epochs carry no learning signal instead of dividing
    by zero.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        raise ValueError("need at least two return values to normalize")
    mean = float(values.mean())
    std = float(values.std(ddof=1))
    if std < _STD_FLOOR:
        return np.zeros_like(values), ReturnStats(mean, 0.0)
    return (values - mean) / std, ReturnStats(mean, std)


def normalize_epoch_returns(returns_kh: np.ndarray) -> tuple[np.ndarray, ReturnStats]:
    """Normalize an epoch's (episodes x steps) return matrix.

    With two or more episodes, returns are centered per time index across
    episodes and then scaled by one pooled sample std of the centered
    values. A uniform per-step reward shift leaves a time-dependent
    offset in finite-horizon suffix returns, which the per-index
    centering cancels exactly; the shared scale cancels any positive
    reward scaling without re-inflating near-constant time slices. A
    single episode falls back to pooled normalization (scale-invariant
    only). Reported stats are always the pooled ones.
    """
    returns_kh = np.asarray(returns_kh, dtype=np.float64)
    if returns_kh.ndim != 2:
        raise ValueError("expected a (episodes, steps) return matrix")
    k = returns_kh.shape[0]
    pooled_mean = float(returns_kh.mean())
    pooled_std = float(returns_kh.std(ddof=1)) if returns_kh.size > 1 else 0.0
    stats = ReturnStats(pooled_mean, pooled_std if pooled_std >= _STD_FLOOR else 0.0)
    if k < 2:
        flat, _ = normalize_returns(returns_kh.ravel())
        return flat.reshape(returns_kh.shape), stats
    centered = returns_kh - returns_kh.mean(axis=0)
    scale = float(centered.std(ddof=1))
    if scale < _STD_FLOOR:
        return np.zeros_like(returns_kh), stats
    return centered / scale, stats


@dataclass
class EpochBatch:
    """One agent's experience for one epoch, episode-major and rectangular."""

    observations: np.ndarray  # (episodes * steps, obs_dim)
    actions: np.ndarray  # (episodes * steps,)
    rewards: np.ndarray  # (episodes * steps,) shaped rewards
    n_episodes: int
    horizon: int


class PGAgent:
    """One independent learner: softmax policy plus value baseline."""

    def __init__(
        self,
        obs_size: int,
        n_actions: int,
        cfg: TrainConfig,
        rng: np.random.Generator,
        cache_forward: bool = False,
    ):
        self.cfg = cfg
        self.n_actions = n_actions
        self.policy = MLP(NetworkSpec(obs_size, cfg.hidden, n_actions), rng)
        self.value = MLP(NetworkSpec(obs_size, cfg.hidden, 1), rng)
        self.policy_opt = Adam(lr=cfg.lr)
        self.value_opt = Adam(lr=cfg.lr)
        self.cache_forward = cache_forward
        self._probs_cache: dict[bytes, np.ndarray] = {}
        self._value_cache: dict[bytes, float] = {}
        # return statistics of the last completed epoch; identity before any
        # update so the raw-scale value view starts at the net's raw output
        self.last_stats = ReturnStats(0.0, 1.0)

    def action_probs(self, obs: np.ndarray) -> list[float]:
        if self.cache_forward:
            key = obs.tobytes()
            probs = self._probs_cache.get(key)
            if probs is None:
                probs = self._fresh_probs(obs)
                self._probs_cache[key] = probs
            return probs
        return self._fresh_probs(obs)

    def _fresh_probs(self, obs: np.ndarray) -> list[float]:
        logits = self.policy.forward(obs[None, :])[0]
        if not np.all(np.isfinite(logits)):
            raise FloatingPointError("non-finite policy output")
        return softmax(logits).tolist()

    def select_action(
        self, obs: np.ndarray, rng: np.random.Generator, greedy: bool = False
    ) -> tuple[int, float]:
        """Sample an action and its log-probability from the softmax head."""
        probs = self.action_probs(obs)
        if greedy:
            a = max(range(self.n_actions), key=probs.__getitem__)
        else:
            u = rng.random()
            a = self.n_actions - 1
            acc = 0.0
            for idx in range(self.n_actions):
                acc += probs[idx]
                if u < acc:
                    a = idx
                    break
        return a, math.log(max(probs[a], 1e-300))

    def state_value(self, obs: np.ndarray) -> float:
        if self.cache_forward:
            key = obs.tobytes()
            v = self._value_cache.get(key)
            if v is None:
                v = float(self.value.forward(obs[None, :])[0, 0])
                self._value_cache[key] = v
            return v
        return float(self.value.forward(obs[None, :])[0, 0])

    def raw_state_value(self, obs: np.ndarray) -> float:
        """Critic prediction mapped back to reward units.

        The critic is fit to normalized returns, so protocol-side
        advantage checks denormalize it with the return statistics of the
        last completed epoch (frozen within an epoch). Keeping both sides
        of the residual in reward units makes the request gate scale with
        the rewards themselves.
        """
        stats = self.last_stats
        return stats.mean + stats.std * self.state_value(obs)

    def update(self, batch: EpochBatch) -> None:
        """One optimizer step per network over the whole epoch.

        Actor weight is the normalized return minus the (pre-update)
        value prediction; the critic regresses onto the normalized
        Monte-Carlo returns. Both gradients are clipped to the configured
        global norm.
        """
        k, h = batch.n_episodes, batch.horizon
        m = k * h
        if batch.observations.shape[0] != m:
            raise ValueError("batch size does not match episodes * horizon")
        if not np.all(np.isfinite(batch.rewards)):
            raise FloatingPointError("non-finite shaped rewards in epoch batch")
        returns = np.empty(m, dtype=np.float64)
        for ep in range(k):
            sl = slice(ep * h, (ep + 1) * h)
            returns[sl] = compute_returns(batch.rewards[sl], self.cfg.gamma)
        normalized, self.last_stats = normalize_epoch_returns(returns.reshape(k, h))
        targets = normalized.ravel()

        obs = np.asarray(batch.observations, dtype=np.float64)
        v_out, v_cache = self.value.forward_cached(obs)
        values = v_out[:, 0]
        advantages = targets - values

        logits, p_cache = self.policy.forward_cached(obs)
        probs = softmax(logits)
        onehot = np.zeros_like(probs)
        onehot[np.arange(m), batch.actions] = 1.0
        dlogits = (advantages[:, None] * (probs - onehot)) / m
        pgw, pgb = self.policy.backward(p_cache, dlogits)
        pgrad = clip_global_norm(MLP.flatten_grads(pgw, pgb), self.cfg.clip_norm)

        dvalues = (2.0 / m) * (values - targets)
        vgw, vgb = self.value.backward(v_cache, dvalues[:, None])
        vgrad = clip_global_norm(MLP.flatten_grads(vgw, vgb), self.cfg.clip_norm)

        if not (np.all(np.isfinite(pgrad)) and np.all(np.isfinite(vgrad))):
            raise FloatingPointError(
                "non-finite gradient in update "
                f"(policy norm {np.linalg.norm(pgrad):.3g}, value norm {np.linalg.norm(vgrad):.3g})"
            )
        self.policy.set_flat(self.policy_opt.step(self.policy.get_flat(), pgrad))
        self.value.set_flat(self.value_opt.step(self.value.get_flat(), vgrad))
        self._probs_cache.clear()
        self._value_cache.clear()


# -- parameter checkpoints: little-endian float32 with a layer-size header --

_MAGIC = b"DSNN"


def write_param_blocks(path, blocks: list[tuple[list[int], np.ndarray]]) -> None:
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<II", 1, len(blocks)))
        for sizes, flat in blocks:
            f.write(struct.pack("<I", len(sizes)))
            f.write(struct.pack(f"<{len(sizes)}I", *sizes))
            f.write(np.asarray(flat).astype("<f4").tobytes())


def save_params(path, nets: list[MLP]) -> None:
    write_param_blocks(path, [(net.spec.sizes(), net.get_flat()) for net in nets])


def load_params(path) -> list[tuple[list[int], np.ndarray]]:
    """Read a checkpoint back as (layer sizes, flat float32 params) pairs."""
    out = []
    with open(path, "rb") as f:
        if f.read(4) != _MAGIC:
            raise ValueError("not a parameter checkpoint file")
        _, n_nets = struct.unpack("<II", f.read(8))
        for _ in range(n_nets):
            (n_sizes,) = struct.unpack("<I", f.read(4))
            sizes = list(struct.unpack(f"<{n_sizes}I", f.read(4 * n_sizes)))
            count = sum(sizes[i] * sizes[i + 1] + sizes[i + 1] for i in range(len(sizes) - 1))
            flat = np.frombuffer(f.read(4 * count), dtype="<f4").astype(np.float64)
            out.append((sizes, flat))
    return out


def restore_agent(agent: PGAgent, checkpoint: list[tuple[list[int], np.ndarray]]) -> None:
    for net, (sizes, flat) in zip((agent.policy, agent.value), checkpoint):
        if sizes != net.spec.sizes():
            raise ValueError(f"checkpoint layer sizes {sizes} do not match {net.spec.sizes()}")
        net.set_flat(flat)
    agent._probs_cache.clear()
    agent._value_cache.clear()
