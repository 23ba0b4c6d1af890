from .base import Environment, EnvKind, EnvStep
from .coin import CoinGame
from .harvest import HarvestCommons
from .ipd import IteratedPD

__all__ = ["Environment", "EnvKind", "EnvStep", "CoinGame", "HarvestCommons", "IteratedPD"]
