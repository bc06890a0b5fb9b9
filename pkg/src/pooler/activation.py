"""
Overlap and inhibition phases.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionMismatchError
from .topology import NeighborhoodMap

try:
    from ..utils import get_logger
except ImportError:
    from utils import get_logger

logger = get_logger(__name__)

# Differences smaller than this fraction of the operands count as ties
MEAN_RTOL = 1e-12


def compare_to_mean(values: np.ndarray, sums: np.ndarray, counts: np.ndarray,
                    strict: bool) -> np.ndarray:
    """values vs sums / counts, evaluated as values * counts vs sums.

    Rounding noise below MEAN_RTOL (relative) is treated as equality, so a
    constant input never beats its own mean and scaling every operand by
    a positive constant leaves the outcome unchanged.
    """
    scaled = np.asarray(values, dtype=np.float64) * counts
    sums = np.asarray(sums, dtype=np.float64)
    tol = MEAN_RTOL * np.maximum(np.abs(scaled), np.abs(sums))
    diff = scaled - sums
    if strict:
        return diff > tol
    return diff >= -tol


@dataclass(frozen=True, eq=False)
class Sdr:
    """Binary column activations with the column grid they belong to"""

    bits: np.ndarray
    dims: Tuple[int, int]

    def __post_init__(self):
        bits = np.asarray(self.bits).astype(np.uint8).ravel()
        if bits.size != self.dims[0] * self.dims[1]:
            raise DimensionMismatchError(f"{bits.size} bits do not fill dims {self.dims}")
        if np.any(bits > 1):
            raise ValueError("SDR entries must be 0 or 1")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "dims", (int(self.dims[0]), int(self.dims[1])))

    @classmethod
    def from_bits(cls, bits: Sequence[int], dims: Optional[Tuple[int, int]] = None) -> "Sdr":
        bits = np.asarray(bits)
        return cls(bits, dims or (1, bits.size))

    @property
    def active(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    @property
    def density(self) -> float:
        return float(self.bits.mean()) if self.bits.size else 0.0

    def as_grid(self) -> np.ndarray:
        return self.bits.reshape(self.dims)


def compute_overlap(conn, pattern, beta) -> np.ndarray:
    """o_i = beta_i * sum_j B_ij Z_j"""
    z = np.asarray(pattern, dtype=np.float64).ravel()
    beta = np.asarray(beta, dtype=np.float64).ravel()
    if z.size != conn.n_inputs:
        raise DimensionMismatchError(f"input has {z.size} values, connections expect {conn.n_inputs}")
    if beta.size != conn.n_columns:
        raise DimensionMismatchError(f"{beta.size} boost factors for {conn.n_columns} columns")

    totals = np.bincount(conn.rows, weights=conn.values * z[conn.cols], minlength=conn.n_columns)
    return beta * totals


def _decimal_fraction(value: float) -> Fraction:
    # Shortest repr keeps 0.3 as 3/10 rather than its binary approximation
    return Fraction(repr(float(value)))


def percentile_rank(q: Union[float, Fraction], n: int) -> int:
    """1-based nearest-rank ceil(q * n), exact, clamped to [1, n]"""
    fq = q if isinstance(q, Fraction) else _decimal_fraction(q)
    rank = -((-fq.numerator * n) // fq.denominator)
    return min(max(int(rank), 1), n)


def prctile(values, q: Union[float, Fraction]) -> float:
    """Nearest-rank percentile: the element at rank ceil(q * |V|) of sorted V"""
    ordered = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if ordered.size == 0:
        raise ValueError("percentile of an empty set")
    return float(ordered[percentile_rank(q, ordered.size) - 1])


def density_threshold(values, s: float) -> float:
    """prctile(values, 1 - s) with 1 - s formed exactly"""
    return prctile(values, 1 - _decimal_fraction(s))


def _check_neighborhood(overlaps: np.ndarray, nbr: NeighborhoodMap):
    if len(nbr) != overlaps.size:
        raise DimensionMismatchError(f"neighborhood map covers {len(nbr)} columns, "
                                     f"overlap vector has {overlaps.size}")


def inhibit_percentile(overlaps, nbr: NeighborhoodMap, s: float, theta_s: float,
                       dims: Optional[Tuple[int, int]] = None) -> Sdr:
    """alpha_i = 1 iff o_i >= prctile(NO(i), 1 - s) and o_i >= theta_s.

    A column without neighbors is judged by theta_s alone.
    """
    o = np.asarray(overlaps, dtype=np.float64).ravel()
    _check_neighborhood(o, nbr)

    alpha = np.zeros(o.size, dtype=np.uint8)
    for column in range(o.size):
        if o[column] < theta_s:
            continue
        neighbors = nbr[column]
        if neighbors.size == 0:
            alpha[column] = 1
            continue
        if o[column] >= density_threshold(o[neighbors], s):
            alpha[column] = 1

    return Sdr(alpha, dims or (1, o.size))


def inhibit_mean(overlaps, nbr: NeighborhoodMap, dims: Optional[Tuple[int, int]] = None) -> Sdr:
    """alpha_i = 1 iff o_i >= mean(o_j : j in N(i)); without neighbors, o_i > 0"""
    o = np.asarray(overlaps, dtype=np.float64).ravel()
    _check_neighborhood(o, nbr)

    sizes = nbr.sizes()
    sums = np.array([o[n].sum() for n in nbr.neighbors], dtype=np.float64)
    alpha = compare_to_mean(o, sums, sizes, strict=False)
    lonely = sizes == 0
    alpha[lonely] = o[lonely] > 0

    if o.size and not np.any(o):
        logger.warning("All overlaps are zero; mean inhibition activates every column with neighbors")

    return Sdr(alpha.astype(np.uint8), dims or (1, o.size))
