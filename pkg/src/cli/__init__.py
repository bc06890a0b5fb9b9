"""
Command-line interface binding the pooler, imaging, recognizer and bench packages
"""

from .run_config import RunConfig, DEFAULTS, KEY_TYPES, coerce_value, parse_size
from .app import (
    main, build_parser, cmd_encode, cmd_train, cmd_eval, cmd_sweep,
    EXIT_OK, EXIT_FAILURE, EXIT_INPUT, EXIT_CONFIG, EXIT_INTERRUPTED,
)

__all__ = [
    'RunConfig', 'DEFAULTS', 'KEY_TYPES', 'coerce_value', 'parse_size',
    'main', 'build_parser', 'cmd_encode', 'cmd_train', 'cmd_eval', 'cmd_sweep',
    'EXIT_OK', 'EXIT_FAILURE', 'EXIT_INPUT', 'EXIT_CONFIG', 'EXIT_INTERRUPTED',
]
