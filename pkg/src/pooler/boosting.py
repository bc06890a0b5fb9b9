"""
Boosting: time-averaged column activity, neighborhood recent activity and
the boost factor update.
"""

from dataclasses import dataclass

import numpy as np

from .activation import Sdr
from .errors import ConfigError, DimensionMismatchError
from .topology import NeighborhoodMap

BETA_MIN = np.finfo(np.float64).tiny
BETA_MAX = np.finfo(np.float64).max


@dataclass(frozen=True, eq=False)
class BoostState:
    """beta: per-column boost factor (> 0); abar: time-averaged activity in [0, 1]"""

    beta: np.ndarray
    abar: np.ndarray

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=np.float64).ravel()
        abar = np.asarray(self.abar, dtype=np.float64).ravel()
        if beta.size != abar.size:
            raise DimensionMismatchError(f"{beta.size} boost factors vs {abar.size} activity values")
        if beta.size and not np.all(beta > 0):
            raise ValueError("boost factors must be positive")
        if abar.size and (abar.min() < 0.0 or abar.max() > 1.0):
            raise ValueError("time-averaged activity must lie in [0, 1]")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "abar", abar)

    @classmethod
    def initial(cls, n_columns: int) -> "BoostState":
        """beta = 1, abar = 0 for every column"""
        return cls(np.ones(n_columns), np.zeros(n_columns))

    def __len__(self) -> int:
        return int(self.beta.size)


def _as_bits(alpha) -> np.ndarray:
    if isinstance(alpha, Sdr):
        return alpha.bits.astype(np.float64)
    return np.asarray(alpha, dtype=np.float64).ravel()


def update_time_average(abar_prev, alpha, big_t: int) -> np.ndarray:
    """abar(t) = ((T - 1) * abar(t-1) + alpha(t)) / T"""
    if isinstance(big_t, bool) or int(big_t) != big_t or big_t < 1:
        raise ConfigError("big_t", f"averaging window must be a positive integer, got {big_t!r}")
    prev = np.asarray(abar_prev, dtype=np.float64).ravel()
    bits = _as_bits(alpha)
    if prev.size != bits.size:
        raise DimensionMismatchError(f"{prev.size} activity values vs {bits.size} columns")
    return ((big_t - 1) * prev + bits) / big_t


def recent_activity(abar, nbr: NeighborhoodMap) -> np.ndarray:
    """Mean of abar_j over the neighbors j of each column.

    A column without neighbors reports its own abar.
    """
    abar = np.asarray(abar, dtype=np.float64).ravel()
    if len(nbr) != abar.size:
        raise DimensionMismatchError(f"neighborhood map covers {len(nbr)} columns, "
                                     f"activity vector has {abar.size}")
    result = abar.copy()
    for column, neighbors in enumerate(nbr.neighbors):
        if neighbors.size:
            result[column] = abar[neighbors].mean()
    return result


def update_boost(abar, recent, eta: float) -> np.ndarray:
    """beta_i = exp(-eta * (abar_i - recent_i)), clipped to [BETA_MIN, BETA_MAX]"""
    abar = np.asarray(abar, dtype=np.float64).ravel()
    recent = np.asarray(recent, dtype=np.float64).ravel()
    if abar.size != recent.size:
        raise DimensionMismatchError(f"{abar.size} activity values vs {recent.size} recent values")
    if eta < 0:
        raise ConfigError("eta", f"must be non-negative, got {eta}")
    with np.errstate(over="ignore", under="ignore"):
        beta = np.exp(-eta * (abar - recent))
    return np.clip(beta, BETA_MIN, BETA_MAX)


def step_boost(state: BoostState, alpha: Sdr, nbr: NeighborhoodMap, big_t: int,
               eta: float) -> BoostState:
    """One pass of the three boosting updates after an inhibition step"""
    abar = update_time_average(state.abar, alpha, big_t)
    beta = update_boost(abar, recent_activity(abar, nbr), eta)
    return BoostState(beta, np.clip(abar, 0.0, 1.0))
