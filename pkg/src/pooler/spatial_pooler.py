"""
Spatial pooler running the four phases over explicit state.
"""

import time
from typing import Optional, Sequence

import numpy as np

from .activation import Sdr, compute_overlap, inhibit_mean, inhibit_percentile
from .boosting import BoostState, step_boost
from .config import InhibitMode, InitMode, SpConfig
from .rng import CounterRng
from .synapses import (
    ConnectionMatrix, PermanenceMatrix, connect_synapses, hebbian_update,
    init_connections_rule_based, init_permanence_random,
)
from .topology import (
    NeighborhoodMap, Topology, build_potential_pool, compute_neighborhoods, derive_phi,
)

try:
    from ..utils import get_logger, log_performance
except ImportError:
    from utils import get_logger, log_performance

logger = get_logger(__name__)


class SpatialPooler:
    """Initialization, overlap, inhibition and (optionally) learning.

    In random-weight mode the permanences are drawn once and binarized at
    theta_c; in rule-based mode the connections are derived from every input
    pattern by comparing each input against the mean of its potential pool.
    Boost factors start at 1.
    """

    def __init__(self, input_dims: Sequence[int], column_dims: Sequence[int],
                 config: Optional[SpConfig] = None, derive_radius: bool = False):
        start = time.time()
        self.config = config or SpConfig()
        self.topology = Topology(tuple(input_dims), tuple(column_dims))
        self.rng = CounterRng(self.config.seed)
        self.pool = build_potential_pool(self.topology, self.config, self.rng)

        self.permanences: Optional[PermanenceMatrix] = None
        self._connections: Optional[ConnectionMatrix] = None
        if self.config.init_mode == InitMode.RANDOM_WEIGHT:
            self.permanences = init_permanence_random(self.pool, self.config, self.rng)
            self._connections = connect_synapses(self.permanences, self.config.theta_c)

        self.phi = self.config.phi
        if derive_radius:
            reference = self._connections
            if reference is None:
                reference = ConnectionMatrix(self.pool.rows, self.pool.cols, np.ones(len(self.pool)),
                                             self.pool.n_columns, self.pool.n_inputs)
            self.phi = derive_phi(reference, self.topology)
        self.neighborhoods: NeighborhoodMap = compute_neighborhoods(self.topology, self.phi)

        self.boost = BoostState.initial(self.topology.n_columns)
        self.iteration = 0
        log_performance(logger, "spatial pooler init", time.time() - start,
                        columns=self.topology.n_columns, synapses=len(self.pool),
                        mode=self.config.init_mode.value, phi=round(self.phi, 3))

    @property
    def n_columns(self) -> int:
        return self.topology.n_columns

    def connections_for(self, pattern) -> ConnectionMatrix:
        """Connection matrix in effect for this input"""
        if self.config.init_mode == InitMode.RULE_BASED:
            return init_connections_rule_based(self.pool, pattern)
        return self._connections

    def overlaps(self, pattern) -> np.ndarray:
        z = self.topology.flatten_input(pattern)
        return compute_overlap(self.connections_for(z), z, self.boost.beta)

    def inhibit(self, overlaps: np.ndarray) -> Sdr:
        dims = self.topology.column_dims
        if self.config.inhibit_mode == InhibitMode.PERCENTILE:
            return inhibit_percentile(overlaps, self.neighborhoods, self.config.s,
                                      self.config.theta_s, dims=dims)
        return inhibit_mean(overlaps, self.neighborhoods, dims=dims)

    def compute(self, pattern, learn: bool = False) -> Sdr:
        """Active columns for one input; with learn=True also adapt
        permanences (random-weight mode) and boost factors."""
        z = self.topology.flatten_input(pattern)
        alpha = self.inhibit(self.overlaps(z))

        if learn:
            if self.config.init_mode == InitMode.RANDOM_WEIGHT:
                self.permanences = hebbian_update(self.permanences, alpha, z, self.pool,
                                                  self.config.perm_delta)
                self._connections = connect_synapses(self.permanences, self.config.theta_c)
            self.boost = step_boost(self.boost, alpha, self.neighborhoods,
                                    self.config.big_t, self.config.eta)

        self.iteration += 1
        logger.debug(f"Iteration {self.iteration}: {len(alpha.active)}/{self.n_columns} active")
        return alpha
