"""
HTM spatial pooler core: topology, synapse initialization, overlap,
inhibition, boosting and Hebbian learning.
"""

from .errors import (
    SpatialPoolerError, ConfigError, TopologyError, DimensionMismatchError, SerializationError,
)
from .config import SpConfig, InitMode, InhibitMode
from .rng import CounterRng, STREAM_POOL, STREAM_PERMANENCE, STREAM_SPLIT
from .topology import (
    Topology, PotentialPool, NeighborhoodMap, build_potential_pool, compute_neighborhoods,
    derive_phi,
)
from .activation import (
    Sdr, compare_to_mean, compute_overlap, prctile, percentile_rank, density_threshold,
    inhibit_percentile, inhibit_mean,
)
from .synapses import (
    SynapseMatrix, PermanenceMatrix, ConnectionMatrix, init_permanence_random,
    connect_synapses, init_connections_rule_based, hebbian_update,
)
from .boosting import BoostState, update_time_average, recent_activity, update_boost, step_boost
from .serialization import (
    MatrixRecord, ValueKind, save_matrix, load_matrix, save_records, load_records,
)
from .spatial_pooler import SpatialPooler

__all__ = [
    'SpatialPoolerError', 'ConfigError', 'TopologyError', 'DimensionMismatchError',
    'SerializationError',
    'SpConfig', 'InitMode', 'InhibitMode',
    'CounterRng', 'STREAM_POOL', 'STREAM_PERMANENCE', 'STREAM_SPLIT',
    'Topology', 'PotentialPool', 'NeighborhoodMap', 'build_potential_pool',
    'compute_neighborhoods', 'derive_phi',
    'Sdr', 'compare_to_mean', 'compute_overlap', 'prctile', 'percentile_rank', 'density_threshold',
    'inhibit_percentile', 'inhibit_mean',
    'SynapseMatrix', 'PermanenceMatrix', 'ConnectionMatrix', 'init_permanence_random',
    'connect_synapses', 'init_connections_rule_based', 'hebbian_update',
    'BoostState', 'update_time_average', 'recent_activity', 'update_boost', 'step_boost',
    'MatrixRecord', 'ValueKind', 'save_matrix', 'load_matrix', 'save_records', 'load_records',
    'SpatialPooler',
]
