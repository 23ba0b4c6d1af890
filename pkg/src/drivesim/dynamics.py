"""External reward-change schedules applied per epoch.

Each schedule is a positive affine map of the reward whose scale/shift
varies with the epoch index: linear growth, exponential decay, stepwise
jumps, and a damped cosine that periodically collapses the reward scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .games import AffineChange


class RewardChangeKind(Enum):
    IDENTITY = "identity"
    LINEAR_INCREASE = "linear"
    EXPONENTIAL_DECAY = "exp_decay"
    STEPWISE_INCREASE = "stepwise"
    DAMPED_COSINE = "damped_cos"


@dataclass(frozen=True)
class RewardChange:
    """Schedule parameters: rate eta, step offset chi, epoch budget."""

    kind: RewardChangeKind = RewardChangeKind.IDENTITY
    eta: float = 0.001
    chi: float = 10.0
    epochs: int = 4000

    def __post_init__(self):
        if self.kind is not RewardChangeKind.IDENTITY and self.eta <= 0:
            raise ValueError("eta must be positive for non-identity schedules")
        if self.kind is RewardChangeKind.DAMPED_COSINE and self.epochs < 1:
            raise ValueError("damped cosine needs an epoch budget >= 1")

    def apply(self, u: float, epoch: int) -> float:
        """Transformed reward at the given epoch."""
        f = self.as_affine(epoch)
        return f.scale * u + f.shift

    def as_affine(self, epoch: int) -> AffineChange:
        """The schedule at one epoch, expressed as scale and shift."""
        if epoch < 0:
            raise ValueError("epoch must be non-negative")
        m = float(epoch)
        k = self.kind
        if k is RewardChangeKind.IDENTITY:
            return AffineChange(1.0, 0.0, epoch)
        if k is RewardChangeKind.LINEAR_INCREASE:
            return AffineChange(self.eta * m + 1.0, 0.0, epoch)
        if k is RewardChangeKind.EXPONENTIAL_DECAY:
            return AffineChange(math.exp(-self.eta * m), 0.0, epoch)
        if k is RewardChangeKind.STEPWISE_INCREASE:
            return AffineChange(math.floor(self.eta * m) + self.chi, 0.0, epoch)
        if k is RewardChangeKind.DAMPED_COSINE:
            scale = (1.0 - m / self.epochs) * math.cos(2.0 * self.eta * m) ** 2
            return AffineChange(scale, self.eta, epoch)
        raise ValueError(f"unknown schedule kind {k!r}")
