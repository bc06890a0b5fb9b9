"""
Spatial pooler hyperparameters
"""

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict

from .errors import ConfigError

UINT64_MAX = 2 ** 64 - 1


class InitMode(Enum):
    """How synapse weights are assigned in the initialization phase"""
    RANDOM_WEIGHT = "random"
    RULE_BASED = "rule"

    @classmethod
    def parse(cls, value: Any) -> "InitMode":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        aliases = {
            "random": cls.RANDOM_WEIGHT, "randomweight": cls.RANDOM_WEIGHT,
            "random_weight": cls.RANDOM_WEIGHT,
            "rule": cls.RULE_BASED, "rulebased": cls.RULE_BASED, "rule_based": cls.RULE_BASED,
        }
        if text not in aliases:
            raise ConfigError("init_mode", f"unknown mode {value!r} (expected random or rule)")
        return aliases[text]


class InhibitMode(Enum):
    """Which inhibition rule selects the active columns"""
    PERCENTILE = "percentile"
    MEAN = "mean"

    @classmethod
    def parse(cls, value: Any) -> "InhibitMode":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        if text not in ("percentile", "mean"):
            raise ConfigError("inhibit_mode", f"unknown mode {value!r} (expected percentile or mean)")
        return cls(text)


def _check_fraction(key: str, value: float, low_open: bool = False):
    if not isinstance(value, (int, float)) or isinstance(value, bool) or math.isnan(value):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if low_open and not 0.0 < value <= 1.0:
        raise ConfigError(key, f"must lie in (0, 1], got {value}")
    if not low_open and not 0.0 <= value <= 1.0:
        raise ConfigError(key, f"must lie in [0, 1], got {value}")


def _check_positive_int(key: str, value: int):
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ConfigError(key, f"must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class SpConfig:
    """Every spatial pooler hyperparameter in one validated record.

    Attributes:
        gamma: hypercube edge length of a column's receptive field, in input cells
        rho: fraction of the hypercube drawn into the potential pool; 0 is rejected
        theta_c: permanence at or above which a synapse is connected
        theta_s: stimulus threshold on the overlap (0 disables it)
        s: target activation density used by percentile inhibition
        phi: inhibition radius in column-grid units
        eta: boost adaptation rate
        big_t: T, the activity-averaging window
        perm_delta: Hebbian permanence increment/decrement
        init_mode: random-weight or rule-based initialization
        inhibit_mode: percentile or mean inhibition
        seed: 64-bit seed for every random draw
    """

    gamma: int = 3
    rho: float = 0.5
    theta_c: float = 0.5
    theta_s: float = 0.0
    s: float = 0.5
    phi: float = 1.5
    eta: float = 1.0
    big_t: int = 10
    perm_delta: float = 0.05
    init_mode: InitMode = InitMode.RULE_BASED
    inhibit_mode: InhibitMode = InhibitMode.MEAN
    seed: int = 42

    def __post_init__(self):
        # Enums may arrive as strings from configuration files
        object.__setattr__(self, "init_mode", InitMode.parse(self.init_mode))
        object.__setattr__(self, "inhibit_mode", InhibitMode.parse(self.inhibit_mode))

        _check_positive_int("gamma", self.gamma)
        _check_positive_int("big_t", self.big_t)
        _check_fraction("rho", self.rho, low_open=True)
        _check_fraction("theta_c", self.theta_c)
        _check_fraction("s", self.s, low_open=True)
        _check_fraction("perm_delta", self.perm_delta)

        for key in ("theta_s", "eta"):
            value = getattr(self, key)
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not value >= 0:
                raise ConfigError(key, f"must be a non-negative number, got {value!r}")
        if not isinstance(self.phi, (int, float)) or isinstance(self.phi, bool) or not self.phi > 0:
            raise ConfigError("phi", f"must be a positive number, got {self.phi!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed <= UINT64_MAX:
            raise ConfigError("seed", f"must be an unsigned 64-bit integer, got {self.seed!r}")

    def replace(self, **changes: Any) -> "SpConfig":
        """Copy with some fields changed (validated again)"""
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        data["init_mode"] = self.init_mode.value
        data["inhibit_mode"] = self.inhibit_mode.value
        return data
