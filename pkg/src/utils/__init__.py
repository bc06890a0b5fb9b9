"""
Utility modules shared by the pooler, imaging, recognizer, bench and cli packages
"""

from .logger import (
    get_logger, setup_logging, set_log_level, LoggerManager, ProgressLogger,
    log_exception, log_performance,
)
from .file_manager import FileManager, DataLoader, ConfigLoader
from .validators import SchemaValidator

__all__ = [
    'get_logger', 'setup_logging', 'set_log_level', 'LoggerManager', 'ProgressLogger',
    'log_exception', 'log_performance',
    'FileManager', 'DataLoader', 'ConfigLoader',
    'SchemaValidator'
]
