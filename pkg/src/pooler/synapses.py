"""
Synapse state: permanence values S and binary connections B over a
potential pool, plus the two ways of initializing them and the Hebbian
permanence update.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from .activation import Sdr, compare_to_mean
from .config import SpConfig
from .errors import DimensionMismatchError, TopologyError
from .rng import CounterRng, STREAM_PERMANENCE
from .topology import PotentialPool

try:
    from ..utils import get_logger
except ImportError:
    from utils import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class SynapseMatrix:
    """Sparse (column, input) -> value map stored as sorted COO arrays.

    Only pairs of the potential pool are stored; absent pairs read as 0.
    """

    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    n_columns: int
    n_inputs: int

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64).ravel()
        cols = np.asarray(self.cols, dtype=np.int64).ravel()
        values = np.asarray(self.values, dtype=np.float64).ravel()
        if not rows.size == cols.size == values.size:
            raise DimensionMismatchError("rows, cols and values differ in length")
        keys = rows * self.n_inputs + cols
        if keys.size and np.any(np.diff(keys) <= 0):
            raise TopologyError("synapse pairs must be sorted and free of duplicates")
        if rows.size and (rows.min() < 0 or rows.max() >= self.n_columns
                          or cols.min() < 0 or cols.max() >= self.n_inputs):
            raise TopologyError("synapse pair outside the column/input range")
        self._check_values(values)
        for name, arr in (("rows", rows), ("cols", cols), ("values", values)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def _check_values(self, values: np.ndarray):
        pass

    @classmethod
    def from_pool(cls, pool: PotentialPool, values) -> "SynapseMatrix":
        return cls(pool.rows, pool.cols, values, pool.n_columns, pool.n_inputs)

    @classmethod
    def from_dict(cls, entries: Dict[Tuple[int, int], float], n_columns: int,
                  n_inputs: int) -> "SynapseMatrix":
        """Build from {(i, j): value}; handy for small hand-written cases"""
        ordered = sorted(entries.items())
        rows = np.array([k[0] for k, _ in ordered], dtype=np.int64)
        cols = np.array([k[1] for k, _ in ordered], dtype=np.int64)
        values = np.array([v for _, v in ordered], dtype=np.float64)
        return cls(rows, cols, values, n_columns, n_inputs)

    def __len__(self) -> int:
        return int(self.rows.size)

    def __iter__(self) -> Iterator[Tuple[int, int, float]]:
        for i, j, v in zip(self.rows, self.cols, self.values):
            yield int(i), int(j), float(v)

    def keys(self) -> np.ndarray:
        return self.rows * self.n_inputs + self.cols

    def as_dict(self) -> Dict[Tuple[int, int], float]:
        return {(i, j): v for i, j, v in self}

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n_columns, self.n_inputs), dtype=np.float64)
        dense[self.rows, self.cols] = self.values
        return dense

    def row(self, column: int) -> Tuple[np.ndarray, np.ndarray]:
        lo, hi = np.searchsorted(self.rows, [column, column + 1])
        return self.cols[lo:hi], self.values[lo:hi]

    def same_entries(self, other: "SynapseMatrix") -> bool:
        """Bit-identical pairs, values and shape"""
        return (self.n_columns == other.n_columns and self.n_inputs == other.n_inputs
                and np.array_equal(self.rows, other.rows)
                and np.array_equal(self.cols, other.cols)
                and np.array_equal(self.values, other.values))


class PermanenceMatrix(SynapseMatrix):
    """S_ij in [0, 1]"""

    def _check_values(self, values: np.ndarray):
        if values.size and (np.isnan(values).any() or values.min() < 0.0 or values.max() > 1.0):
            raise ValueError("permanence values must lie in [0, 1]")


@dataclass(frozen=True, eq=False)
class ConnectionMatrix(SynapseMatrix):
    """B_ij in {0, 1}.

    `empty_columns` lists columns that had no potential inputs when the
    matrix was derived (they contribute an all-zero row).
    """

    empty_columns: Tuple[int, ...] = field(default=())

    def _check_values(self, values: np.ndarray):
        if values.size and not np.all((values == 0.0) | (values == 1.0)):
            raise ValueError("connection values must be exactly 0 or 1")

    @property
    def n_connected(self) -> int:
        return int(np.count_nonzero(self.values))

    def connected_inputs(self, column: int) -> np.ndarray:
        cols, values = self.row(column)
        return cols[values > 0]


def init_permanence_random(pool: PotentialPool, config: SpConfig,
                           rng: Optional[CounterRng] = None) -> PermanenceMatrix:
    """S_ij ~ U(0, 1) for j in PI(i), keyed by (seed, i, j) on the
    PERMANENCE stream; absent pairs stay 0."""
    rng = rng or CounterRng(config.seed)
    values = rng.uniform(STREAM_PERMANENCE, pool.rows, pool.cols)
    return PermanenceMatrix.from_pool(pool, values)


def connect_synapses(perm: PermanenceMatrix, theta_c: float) -> ConnectionMatrix:
    """B_ij = 1 iff S_ij >= theta_c"""
    values = (perm.values >= theta_c).astype(np.float64)
    return ConnectionMatrix(perm.rows, perm.cols, values, perm.n_columns, perm.n_inputs)


def init_connections_rule_based(pool: PotentialPool, pattern) -> ConnectionMatrix:
    """B_ij = 1 iff j in PI(i) and x_j > mean(x_k : k in PI(i)).

    Uses no randomness. Columns with an empty pool keep an all-zero row and
    are reported in `empty_columns`.
    """
    x = np.asarray(pattern, dtype=np.float64).ravel()
    if x.size != pool.n_inputs:
        raise DimensionMismatchError(f"input has {x.size} values, pool expects {pool.n_inputs}")

    sizes = pool.sizes()
    sums = np.bincount(pool.rows, weights=x[pool.cols], minlength=pool.n_columns)
    member_values = x[pool.cols]
    connected = compare_to_mean(member_values, sums[pool.rows], sizes[pool.rows], strict=True)

    empty = tuple(int(c) for c in np.flatnonzero(sizes == 0))
    if empty:
        logger.warning(f"{len(empty)} columns have an empty potential pool; "
                       f"their connections stay zero")

    return ConnectionMatrix(pool.rows, pool.cols, connected.astype(np.float64),
                            pool.n_columns, pool.n_inputs, empty_columns=empty)


def hebbian_update(perm: PermanenceMatrix, alpha: Sdr, pattern, pool: PotentialPool,
                   perm_delta: float) -> PermanenceMatrix:
    """For active columns, S_ij += perm_delta where Z_j = 1 and -= where
    Z_j = 0, over j in PI(i), clamped to [0, 1]."""
    z = np.asarray(pattern, dtype=np.float64).ravel()
    bits = alpha.bits
    if z.size != perm.n_inputs:
        raise DimensionMismatchError(f"input has {z.size} values, matrix expects {perm.n_inputs}")
    if bits.size != perm.n_columns:
        raise DimensionMismatchError(f"SDR has {bits.size} columns, matrix expects {perm.n_columns}")
    if not np.array_equal(perm.keys(), pool.keys()):
        raise TopologyError("permanence entries do not match the potential pool")

    active = bits[perm.rows].astype(bool)
    step = np.where(z[perm.cols] > 0, perm_delta, -perm_delta)
    values = perm.values.copy()
    values[active] = np.clip(values[active] + step[active], 0.0, 1.0)
    return PermanenceMatrix(perm.rows, perm.cols, values, perm.n_columns, perm.n_inputs)
