"""
Exceptions raised by the spatial pooler core
"""

from typing import Optional


class SpatialPoolerError(Exception):
    """Base exception for spatial pooler failures"""
    pass


class ConfigError(SpatialPoolerError, ValueError):
    """A hyperparameter is missing or outside its valid range"""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class TopologyError(SpatialPoolerError):
    """Input/column geometry cannot support the requested operation"""

    def __init__(self, message: str, column: Optional[int] = None):
        super().__init__(message)
        self.column = column


class DimensionMismatchError(SpatialPoolerError, ValueError):
    """Operands disagree in size"""
    pass


class SerializationError(SpatialPoolerError):
    """A flat matrix file is malformed or truncated"""
    pass
