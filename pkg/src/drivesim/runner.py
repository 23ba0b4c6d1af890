"""End-to-end training orchestration: seeded runs, batches, CSV output.

One run is strictly sequential and draws every random decision
(environment resets, action sampling, conflict permutations) from a
single seeded generator, so identical configs replay exactly. Batches
run independent seeds, optionally in parallel processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import RunConfig, load_map_text
from .envs.base import Environment, EnvKind
from .envs.coin import CoinGame
from .envs.harvest import HarvestCommons
from .envs.ipd import IteratedPD
from .learning import EpochBatch, PGAgent, write_param_blocks
from .metrics import (
    EpisodeLog,
    cooperation_rate,
    equality,
    own_coin_counts,
    peace,
    social_welfare,
    sustainability,
)
from .protocols import (
    FULL_COMPLIANCE,
    ExchangeInput,
    ProtocolKind,
    shaped_rewards,
)

DEGENERATE_SCALE = 1e-6


@dataclass
class RunResult:
    run_id: str
    seed: int
    epochs: int
    metrics: list[str]
    rows: list[tuple[int, str, float]]  # (epoch, metric, value)
    anomalies: list[str] = field(default_factory=list)
    final_params: list[dict] | None = None

    def series(self, metric: str) -> np.ndarray:
        return np.array([v for _, m, v in self.rows if m == metric])


def build_env(cfg: RunConfig) -> Environment:
    e = cfg.env
    if e.kind is EnvKind.IPD:
        return IteratedPD(horizon=e.horizon, gamma=e.gamma)
    if e.kind is EnvKind.COIN:
        return CoinGame(n_agents=e.n_agents, grid=e.grid, horizon=e.horizon, gamma=e.gamma)
    if e.kind is EnvKind.HARVEST:
        return HarvestCommons(
            n_agents=e.n_agents, horizon=e.horizon, gamma=e.gamma, map_text=load_map_text(e)
        )
    raise ValueError(f"unknown environment kind {e.kind!r}")


def _metric_names(kind: EnvKind) -> list[str]:
    if kind is EnvKind.IPD:
        return ["U", "coop_rate"]
    if kind is EnvKind.COIN:
        return ["U", "E", "own_coin_rate"]
    return ["U", "E", "S", "P"]


def run_training(cfg: RunConfig, progress=None) -> RunResult:
    env = build_env(cfg)
    rng = np.random.default_rng(cfg.seed)
    n = env.n_agents
    horizon, k_episodes = env.horizon, cfg.train.episodes_per_epoch
    cache = env.obs_space_hint is not None and env.obs_space_hint <= 4096
    agents = [
        PGAgent(env.obs_size, env.n_actions, cfg.train, rng, cache_forward=cache)
        for _ in range(n)
    ]
    compliance = [cfg.compliance.get(i, FULL_COMPLIANCE) for i in range(n)]
    needs_td = cfg.protocol.kind in (ProtocolKind.DRIVE, ProtocolKind.MATE)
    metric_names = _metric_names(cfg.env.kind)
    rows: list[tuple[int, str, float]] = []
    anomalies: list[str] = []

    samples = k_episodes * horizon
    obs_buf = [np.empty((samples, env.obs_size)) for _ in range(n)]
    act_buf = [np.empty(samples, dtype=int) for _ in range(n)]
    rew_buf = [np.empty(samples) for _ in range(n)]

    for epoch in range(cfg.train.epochs):
        f = cfg.reward_change.as_affine(epoch)
        if abs(f.scale) < DEGENERATE_SCALE:
            anomalies.append(f"epoch {epoch}: degenerate reward scale c_m={f.scale:.3g}")
        u_bar = np.zeros(n)
        step_idx = 0
        unanswered = 0
        episode_logs = []
        pos = 0
        for _ in range(k_episodes):
            obs = env.reset(rng)
            if needs_td:
                v_cur = [agents[i].raw_state_value(obs[i]) for i in range(n)]
            ep_rewards = np.empty((horizon, n))
            ep_actions = np.empty((horizon, n), dtype=int)
            ep_frozen = np.zeros((horizon, n), dtype=bool)
            ep_own = np.zeros((horizon, n), dtype=bool)
            ep_other = np.zeros((horizon, n), dtype=bool)
            for t in range(horizon):
                neighborhoods = env.neighborhoods()
                actions = [agents[i].select_action(obs[i], rng)[0] for i in range(n)]
                step = env.step(actions, rng)
                u_hat = (step.rewards * f.scale + f.shift).tolist()
                u_bar = (step_idx * u_bar + u_hat) / (step_idx + 1)
                step_idx += 1
                if needs_td:
                    v_next = [agents[i].raw_state_value(step.observations[i]) for i in range(n)]
                    td = [
                        u_hat[i] + cfg.train.gamma * v_next[i] - v_cur[i] for i in range(n)
                    ]
                    v_cur = v_next
                else:
                    td = [0.0] * n
                trace = shaped_rewards(
                    cfg.protocol.kind,
                    ExchangeInput(
                        u_hat=u_hat,
                        u_bar=list(u_bar),
                        td_ok=[v >= 0.0 for v in td],
                        neighborhoods=neighborhoods,
                        compliance=compliance,
                        td=td,
                    ),
                    token=cfg.protocol.token_x,
                    alpha=cfg.protocol.alpha,
                    beta=cfg.protocol.beta,
                )
                unanswered += len(trace.anomalies)
                for i in range(n):
                    obs_buf[i][pos] = obs[i]
                    act_buf[i][pos] = actions[i]
                    rew_buf[i][pos] = trace.shaped[i]
                pos += 1
                ep_rewards[t] = step.rewards
                ep_actions[t] = actions
                if step.frozen is not None:
                    ep_frozen[t] = step.frozen
                if step.collected_own is not None:
                    ep_own[t] = step.collected_own
                    ep_other[t] = step.collected_other
                obs = step.observations
            episode_logs.append(
                EpisodeLog(
                    rewards=ep_rewards,
                    joint_actions=ep_actions,
                    frozen=ep_frozen,
                    collected_own=ep_own,
                    collected_other=ep_other,
                )
            )

        for i in range(n):
            try:
                agents[i].update(
                    EpochBatch(obs_buf[i], act_buf[i], rew_buf[i], k_episodes, horizon)
                )
            except FloatingPointError as e:
                raise RuntimeError(f"epoch {epoch}, agent {i}: {e}") from e

        epoch_metrics = _epoch_metrics(cfg.env.kind, episode_logs)
        for name in metric_names:
            rows.append((epoch, name, epoch_metrics[name]))
        if unanswered:
            anomalies.append(f"epoch {epoch}: {unanswered} unanswered requests")
        if progress is not None:
            progress(epoch, epoch_metrics)

    return RunResult(
        run_id=f"s{cfg.seed}",
        seed=cfg.seed,
        epochs=cfg.train.epochs,
        metrics=metric_names,
        rows=rows,
        anomalies=anomalies,
        final_params=[
            {
                "policy_sizes": a.policy.spec.sizes(),
                "policy": a.policy.get_flat(),
                "value_sizes": a.value.spec.sizes(),
                "value": a.value.get_flat(),
            }
            for a in agents
        ],
    )


def _epoch_metrics(kind: EnvKind, logs: list[EpisodeLog]) -> dict[str, float]:
    out = {"U": float(np.mean([social_welfare(log) for log in logs]))}
    if kind is EnvKind.IPD:
        out["coop_rate"] = float(np.mean([cooperation_rate(log) for log in logs]))
        return out
    eq = [equality(log) for log in logs]
    out["E"] = float(np.nanmean(eq)) if np.any(np.isfinite(eq)) else float("nan")
    if kind is EnvKind.COIN:
        counts = [own_coin_counts(log) for log in logs]
        own = sum(c[0] for c in counts)
        total = sum(c[1] for c in counts)
        out["own_coin_rate"] = own / total if total else float("nan")
        return out
    out["S"] = float(np.mean([sustainability(log) for log in logs]))
    out["P"] = float(np.mean([peace(log) for log in logs]))
    return out


# -- batches and output files --


def run_batch(cfg: RunConfig, seeds: list[int], jobs: int = 1) -> list[RunResult]:
    if not seeds:
        raise ValueError("need at least one seed")
    configs = [cfg.with_seed(s) for s in seeds]
    if jobs <= 1 or len(configs) == 1:
        return [run_training(c) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_training, configs))


def summarize(results: list[RunResult]) -> list[tuple[int, str, float, float, int]]:
    """Per (epoch, metric): mean, 95% CI half-width, run count."""
    by_key: dict[tuple[int, str], list[float]] = {}
    order: list[tuple[int, str]] = []
    for res in results:
        for epoch, metric, value in res.rows:
            key = (epoch, metric)
            if key not in by_key:
                by_key[key] = []
                order.append(key)
            by_key[key].append(value)
    out = []
    for epoch, metric in order:
        vals = np.array([v for v in by_key[(epoch, metric)] if math.isfinite(v)])
        if len(vals) == 0:
            out.append((epoch, metric, float("nan"), float("nan"), 0))
            continue
        mean = float(vals.mean())
        half = 1.96 * float(vals.std(ddof=1)) / math.sqrt(len(vals)) if len(vals) > 1 else 0.0
        out.append((epoch, metric, mean, half, len(vals)))
    return out


def write_outputs(results: list[RunResult], out_dir, save_params: bool = False) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    metrics_path = out / "metrics.csv"
    with open(metrics_path, "w") as fh:
        fh.write("run_id,seed,epoch,metric,value\n")
        for res in results:
            for epoch, metric, value in res.rows:
                fh.write(f"{res.run_id},{res.seed},{epoch},{metric},{value!r}\n")
    summary_path = out / "summary.csv"
    with open(summary_path, "w") as fh:
        fh.write("epoch,metric,mean,ci95,n_runs\n")
        for epoch, metric, mean, half, count in summarize(results):
            fh.write(f"{epoch},{metric},{mean!r},{half!r},{count}\n")
    anomalies_path = out / "anomalies.log"
    with open(anomalies_path, "w") as fh:
        for res in results:
            for line in res.anomalies:
                fh.write(f"{res.run_id}: {line}\n")
    if save_params:
        for res in results:
            for i, blocks in enumerate(res.final_params or []):
                write_param_blocks(
                    out / f"params_{res.run_id}_agent{i}.bin",
                    [
                        (blocks["policy_sizes"], blocks["policy"]),
                        (blocks["value_sizes"], blocks["value"]),
                    ],
                )
    return {"metrics": metrics_path, "summary": summary_path, "anomalies": anomalies_path}


def read_summary(path) -> list[tuple[int, str, float, float, int]]:
    rows = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "epoch,metric,mean,ci95,n_runs":
            raise ValueError(f"unexpected summary header: {header}")
        for line in fh:
            epoch, metric, mean, ci, count = line.rstrip("\n").split(",")
            rows.append((int(epoch), metric, float(mean), float(ci), int(count)))
    return rows
