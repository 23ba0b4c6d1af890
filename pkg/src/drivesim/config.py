"""Experiment configuration: JSON loading, validation, defaults."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .dynamics import RewardChange, RewardChangeKind
from .envs.base import EnvKind
from .learning import TrainConfig
from .protocols import ComplianceProfile, ProtocolKind


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EnvConfig:
    kind: EnvKind
    n_agents: int
    horizon: int
    gamma: float
    grid: tuple[int, int] | None = None
    map_file: str | None = None

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigError("env.horizon must be at least 1")
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigError("env.gamma must lie in [0, 1)")
        if self.kind is EnvKind.IPD and self.n_agents != 2:
            raise ConfigError("ipd supports exactly 2 agents")
        if self.n_agents < 2:
            raise ConfigError("need at least 2 agents")


@dataclass(frozen=True)
class ProtocolConfig:
    kind: ProtocolKind = ProtocolKind.NAIVE
    token_x: float = 1.0
    alpha: float = 5.0
    beta: float = 0.05

    def __post_init__(self):
        if self.token_x <= 0:
            raise ConfigError("protocol.token_x must be positive")
        if self.alpha < 0 or self.beta < 0:
            raise ConfigError("protocol.alpha and protocol.beta must be non-negative")


@dataclass(frozen=True)
class RunConfig:
    env: EnvConfig
    protocol: ProtocolConfig = ProtocolConfig()
    reward_change: RewardChange = RewardChange()
    train: TrainConfig = TrainConfig()
    compliance: dict[int, ComplianceProfile] = field(default_factory=dict)
    seed: int = 0
    out_dir: str = "results"

    def __post_init__(self):
        for agent_id in self.compliance:
            if not 0 <= agent_id < self.env.n_agents:
                raise ConfigError(
                    f"compliance entry for agent {agent_id} outside 0..{self.env.n_agents - 1}"
                )

    def with_seed(self, seed: int) -> "RunConfig":
        return RunConfig(
            env=self.env,
            protocol=self.protocol,
            reward_change=self.reward_change,
            train=self.train,
            compliance=self.compliance,
            seed=seed,
            out_dir=self.out_dir,
        )


_ENV_DEFAULTS = {
    EnvKind.IPD: dict(n_agents=2, horizon=150, gamma=0.95),
    EnvKind.COIN: dict(n_agents=2, horizon=150, gamma=0.95),
    EnvKind.HARVEST: dict(n_agents=12, horizon=250, gamma=0.99),
}


def _take(section: dict, allowed: dict, where: str) -> dict:
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key {sorted(unknown)[0]!r} in {where}")
    out = dict(allowed)
    out.update(section)
    return out


def _enum_value(enum_cls, raw, where: str):
    try:
        return enum_cls(raw)
    except ValueError:
        valid = sorted(e.value for e in enum_cls)
        raise ConfigError(f"{where} must be one of {valid}, got {raw!r}") from None


def parse_config(data: dict) -> RunConfig:
    top = _take(
        data,
        dict(env=None, protocol={}, reward_change={}, train={}, compliance={}, seed=0, out_dir="results"),
        "config",
    )
    if not isinstance(top["env"], dict) or "kind" not in top["env"]:
        raise ConfigError("config requires env.kind")
    kind = _enum_value(EnvKind, top["env"]["kind"], "env.kind")
    env_fields = _take(
        {k: v for k, v in top["env"].items() if k != "kind"},
        dict(_ENV_DEFAULTS[kind], grid=None, map_file=None),
        "env",
    )
    if env_fields["grid"] is not None:
        env_fields["grid"] = tuple(env_fields["grid"])
    env = EnvConfig(kind=kind, **env_fields)

    proto_fields = _take(
        top["protocol"], dict(kind="naive", token_x=1.0, alpha=5.0, beta=0.05), "protocol"
    )
    proto_fields["kind"] = _enum_value(ProtocolKind, proto_fields["kind"], "protocol.kind")
    protocol = ProtocolConfig(**proto_fields)

    rc_fields = _take(
        top["reward_change"],
        dict(kind="identity", eta=0.001, chi=10.0, epochs=None),
        "reward_change",
    )
    rc_fields["kind"] = _enum_value(RewardChangeKind, rc_fields["kind"], "reward_change.kind")

    train_fields = _take(
        top["train"],
        dict(
            lr=0.001,
            clip_norm=1.0,
            trace_lambda=1.0,
            episodes_per_epoch=10,
            epochs=4000,
            history_len=1,
            hidden=[64, 64],
        ),
        "train",
    )
    train_fields["hidden"] = tuple(train_fields["hidden"])
    train = TrainConfig(gamma=env.gamma, **train_fields)

    if rc_fields["epochs"] is None:
        rc_fields["epochs"] = train.epochs
    try:
        reward_change = RewardChange(**rc_fields)
    except ValueError as e:
        raise ConfigError(str(e)) from None

    compliance = {}
    for key, section in top["compliance"].items():
        try:
            agent_id = int(key)
        except ValueError:
            raise ConfigError(f"compliance keys must be agent ids, got {key!r}") from None
        fields = _take(
            section, dict(sends_requests=True, sends_responses=True, misreport=None), f"compliance.{key}"
        )
        if fields["misreport"] is not None:
            mode, amount = fields["misreport"]
            if mode not in ("offset", "override"):
                raise ConfigError(f"compliance.{key}.misreport mode must be offset or override")
            fields["misreport"] = (mode, float(amount))
        compliance[agent_id] = ComplianceProfile(**fields)

    return RunConfig(
        env=env,
        protocol=protocol,
        reward_change=reward_change,
        train=train,
        compliance=compliance,
        seed=int(top["seed"]),
        out_dir=str(top["out_dir"]),
    )


def load_config(path) -> RunConfig:
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top-level config must be an object")
    return parse_config(data)


def load_map_text(cfg: EnvConfig) -> str | None:
    if cfg.map_file is None:
        return None
    return Path(cfg.map_file).read_text()
