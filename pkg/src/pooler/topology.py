"""
Input/column geometry: column centers, potential pools and inhibition
neighborhoods.
"""

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .config import SpConfig
from .errors import TopologyError, DimensionMismatchError
from .rng import CounterRng, STREAM_POOL

try:
    from ..utils import get_logger
except ImportError:
    from utils import get_logger

logger = get_logger(__name__)

Dims = Tuple[int, int]


def _check_dims(name: str, dims: Sequence[int]) -> Dims:
    if len(dims) != 2 or any(int(d) != d or d < 1 for d in dims):
        raise TopologyError(f"{name} must be two positive integers, got {tuple(dims)}")
    return int(dims[0]), int(dims[1])


@dataclass(frozen=True, eq=False)
class Topology:
    """Input grid, mini-column grid and each column's center on the input grid.

    Centers are the nearest input cell to the uniformly scaled column
    position: center = floor((2c + 1) * in / (2 * cols)) per axis.
    """

    input_dims: Dims
    column_dims: Dims
    centers: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        input_dims = _check_dims("input_dims", self.input_dims)
        column_dims = _check_dims("column_dims", self.column_dims)
        object.__setattr__(self, "input_dims", input_dims)
        object.__setattr__(self, "column_dims", column_dims)

        coords = self.column_coords
        centers = np.empty_like(coords)
        for axis in range(2):
            n_in, n_col = input_dims[axis], column_dims[axis]
            centers[:, axis] = ((2 * coords[:, axis] + 1) * n_in) // (2 * n_col)
        centers = np.minimum(centers, np.array(input_dims) - 1)
        centers.setflags(write=False)
        object.__setattr__(self, "centers", centers)

    @property
    def n_inputs(self) -> int:
        return self.input_dims[0] * self.input_dims[1]

    @property
    def n_columns(self) -> int:
        return self.column_dims[0] * self.column_dims[1]

    @property
    def column_coords(self) -> np.ndarray:
        """(n_columns, 2) grid coordinates y_i, row-major"""
        rows, cols = np.divmod(np.arange(self.n_columns, dtype=np.int64), self.column_dims[1])
        return np.stack([rows, cols], axis=1)

    def input_coords(self, indices: np.ndarray) -> np.ndarray:
        rows, cols = np.divmod(np.asarray(indices, dtype=np.int64), self.input_dims[1])
        return np.stack([rows, cols], axis=1)

    def hypercube(self, column: int, gamma: int) -> np.ndarray:
        """Sorted flat input indices of the gamma-hypercube around a column's
        center, clipped at the input edges (no wraparound)."""
        spans = []
        for axis in range(2):
            start = int(self.centers[column, axis]) - gamma // 2
            lo = max(start, 0)
            hi = min(start + gamma, self.input_dims[axis])
            spans.append(np.arange(lo, hi, dtype=np.int64))
        rows, cols = np.meshgrid(spans[0], spans[1], indexing="ij")
        return (rows * self.input_dims[1] + cols).ravel()

    def flatten_input(self, values) -> np.ndarray:
        """Row-major flat view of an input pattern, checked against input_dims"""
        flat = np.asarray(values, dtype=np.float64).ravel()
        if flat.size != self.n_inputs:
            raise DimensionMismatchError(
                f"input has {flat.size} values, topology expects {self.n_inputs} {self.input_dims}"
            )
        return flat


@dataclass(frozen=True, eq=False)
class PotentialPool:
    """PI(i) for every column as sorted (column, input) pairs"""

    rows: np.ndarray
    cols: np.ndarray
    n_columns: int
    n_inputs: int

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        if rows.shape != cols.shape:
            raise DimensionMismatchError("pool rows and cols differ in length")
        keys = rows * self.n_inputs + cols
        if keys.size and np.any(np.diff(keys) <= 0):
            raise TopologyError("pool pairs must be sorted and free of duplicates")
        if rows.size and (rows.min() < 0 or rows.max() >= self.n_columns
                          or cols.min() < 0 or cols.max() >= self.n_inputs):
            raise TopologyError("pool pair outside the column/input range")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)

    @classmethod
    def from_lists(cls, members: Sequence[Iterable[int]], n_inputs: int) -> "PotentialPool":
        rows, cols = [], []
        for column, inputs in enumerate(members):
            for j in sorted(set(int(j) for j in inputs)):
                rows.append(column)
                cols.append(j)
        return cls(np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
                   len(members), n_inputs)

    def __len__(self) -> int:
        return int(self.rows.size)

    def keys(self) -> np.ndarray:
        return self.rows * self.n_inputs + self.cols

    def sizes(self) -> np.ndarray:
        return np.bincount(self.rows, minlength=self.n_columns)

    def members(self, column: int) -> np.ndarray:
        lo, hi = np.searchsorted(self.rows, [column, column + 1])
        return self.cols[lo:hi]


def build_potential_pool(topology: Topology, config: SpConfig,
                         rng: Optional[CounterRng] = None) -> PotentialPool:
    """PI(i) = { j in the clipped gamma-hypercube of column i : z_ij < rho }.

    z_ij comes from the POOL stream of a counter-based generator keyed by
    (seed, i, j), so the result does not depend on iteration order.
    """
    rng = rng or CounterRng(config.seed)
    rows, cols = [], []

    for column in range(topology.n_columns):
        candidates = topology.hypercube(column, config.gamma)
        if candidates.size == 0:
            raise TopologyError(f"column {column} has an empty hypercube", column=column)
        if config.rho >= 1.0:
            # z < 1 always holds
            chosen = candidates
        else:
            z = rng.uniform(STREAM_POOL, column, candidates)
            chosen = candidates[z < config.rho]
        rows.append(np.full(chosen.size, column, dtype=np.int64))
        cols.append(chosen)

    pool = PotentialPool(np.concatenate(rows), np.concatenate(cols),
                         topology.n_columns, topology.n_inputs)
    logger.debug(f"Potential pool: {len(pool)} synapses over {topology.n_columns} columns "
                 f"(gamma={config.gamma}, rho={config.rho})")
    return pool


@dataclass(frozen=True, eq=False)
class NeighborhoodMap:
    """N(i) for every column as sorted index arrays"""

    neighbors: Tuple[np.ndarray, ...]

    @classmethod
    def from_lists(cls, lists: Sequence[Iterable[int]]) -> "NeighborhoodMap":
        result = []
        for column, members in enumerate(lists):
            arr = np.array(sorted(set(int(j) for j in members)), dtype=np.int64)
            if np.any(arr == column):
                raise TopologyError(f"column {column} lists itself as a neighbor", column=column)
            result.append(arr)
        return cls(tuple(result))

    @classmethod
    def fully_connected(cls, n: int) -> "NeighborhoodMap":
        """Every column neighbors every other column"""
        everyone = np.arange(n, dtype=np.int64)
        return cls(tuple(everyone[everyone != i] for i in range(n)))

    def __len__(self) -> int:
        return len(self.neighbors)

    def __getitem__(self, column: int) -> np.ndarray:
        return self.neighbors[column]

    def sizes(self) -> np.ndarray:
        return np.array([n.size for n in self.neighbors], dtype=np.int64)


def compute_neighborhoods(topology: Topology, phi: float) -> NeighborhoodMap:
    """N(i) = { j != i : ||y_i - y_j|| < phi } on column-grid coordinates"""
    if not phi > 0:
        raise TopologyError(f"inhibition radius phi must be positive, got {phi}")

    coords = topology.column_coords.astype(np.float64)
    neighbors = []
    for column in range(topology.n_columns):
        distance = np.sqrt(((coords - coords[column]) ** 2).sum(axis=1))
        inside = distance < phi
        inside[column] = False
        neighbors.append(np.flatnonzero(inside).astype(np.int64))

    return NeighborhoodMap(tuple(neighbors))


def derive_phi(conn, topology: Topology) -> float:
    """Inhibition radius from connectivity: average connected span of the
    columns (mean over both axes) times the average columns per input."""
    spans = np.zeros(topology.n_columns, dtype=np.float64)
    connected = conn.values > 0
    rows, cols = conn.rows[connected], conn.cols[connected]

    for column in np.unique(rows):
        coords = topology.input_coords(cols[rows == column])
        spans[column] = np.mean(coords.max(axis=0) - coords.min(axis=0) + 1)

    columns_per_input = np.mean(np.array(topology.column_dims, dtype=np.float64)
                                / np.array(topology.input_dims, dtype=np.float64))
    phi = float(spans.mean() * columns_per_input)
    return max(1.0, phi)
