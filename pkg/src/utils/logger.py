"""
Logging for the pooler, imaging, recognizer, bench and cli packages.

Configuration comes from the `logging:` section of config/settings.yaml
(a logging.config.dictConfig mapping). Without it a coloured stderr console
plus a rotating file under logs/ is installed.
"""

import logging
import logging.config
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

import yaml
from colorama import Back, Fore, Style, init

init(autoreset=True)

PROJECT_ROOT = Path(__file__).resolve().parents[2]
DEFAULT_SETTINGS_PATH = PROJECT_ROOT / "config" / "settings.yaml"

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
DETAILED_FORMAT = "%(asctime)s [%(levelname)s] %(name)s:%(lineno)d: %(message)s"

PACKAGE_LOGGERS = ("pooler", "imaging", "recognizer", "bench", "cli", "utils")


class ColoredFormatter(logging.Formatter):
    """Level- and name-coloured console output"""

    LEVEL_COLORS = {
        logging.DEBUG: Fore.CYAN,
        logging.INFO: Fore.GREEN,
        logging.WARNING: Fore.YELLOW,
        logging.ERROR: Fore.RED,
        logging.CRITICAL: Fore.RED + Back.WHITE + Style.BRIGHT,
    }

    def format(self, record: logging.LogRecord) -> str:
        # the record is shared with the file handler
        painted = logging.makeLogRecord(record.__dict__)
        color = self.LEVEL_COLORS.get(record.levelno, "")
        painted.levelname = f"{color}{record.levelname}{Style.RESET_ALL}"
        painted.name = f"{Fore.BLUE}{record.name}{Style.RESET_ALL}"
        return super().format(painted)


def _default_config() -> Dict[str, Any]:
    package_loggers = {
        name: {"level": "INFO", "handlers": ["console", "file"], "propagate": False}
        for name in PACKAGE_LOGGERS
    }
    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "detailed": {"format": DETAILED_FORMAT},
            "colored": {"()": ColoredFormatter, "format": LOG_FORMAT},
        },
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "level": "WARNING",
                "formatter": "colored",
                "stream": "ext://sys.stderr",
            },
            "file": {
                "class": "logging.handlers.RotatingFileHandler",
                "level": "DEBUG",
                "formatter": "detailed",
                "filename": "logs/app.log",
                "maxBytes": 10 * 1024 * 1024,
                "backupCount": 5,
                "encoding": "utf-8",
            },
        },
        "loggers": package_loggers,
        "root": {"level": "INFO", "handlers": ["console", "file"]},
    }


def _prepare_log_dirs(handlers: Iterable[Dict[str, Any]]):
    """Create the parent directory of every file handler"""
    for handler in handlers:
        filename = handler.get("filename")
        if filename:
            Path(filename).parent.mkdir(parents=True, exist_ok=True)


class LoggerManager:
    """Installs the logging configuration once and hands out named loggers"""

    def __init__(self, config_path: Optional[Union[str, Path]] = None):
        self.config_path = Path(config_path) if config_path else DEFAULT_SETTINGS_PATH
        self.loggers: Dict[str, logging.Logger] = {}
        self._configure()

    def _read_section(self) -> Optional[Dict[str, Any]]:
        if not self.config_path.is_file():
            return None
        with open(self.config_path, "r", encoding="utf-8") as f:
            settings = yaml.safe_load(f) or {}
        return settings.get("logging")

    def _configure(self):
        try:
            config = self._read_section() or _default_config()
            _prepare_log_dirs(config.get("handlers", {}).values())
            logging.config.dictConfig(config)
        except Exception as e:
            logging.basicConfig(level=logging.INFO, format=LOG_FORMAT,
                                handlers=[logging.StreamHandler(sys.stderr)])
            logging.getLogger(__name__).error(f"Logging configuration rejected, using basicConfig: {e}")

    def get_logger(self, name: str) -> logging.Logger:
        return self.loggers.setdefault(name, logging.getLogger(name))

    def set_level(self, level: str):
        """Apply a level to the root, package and managed loggers and to their
        console handlers; file handlers keep their configured level."""
        value = logging.getLevelName(level.upper())
        if not isinstance(value, int):
            value = logging.INFO
        top_level = [logging.getLogger(name) for name in logging.root.manager.loggerDict
                     if "." not in name]
        for logger in [logging.getLogger(), *top_level, *self.loggers.values()]:
            logger.setLevel(value)
            for handler in logger.handlers:
                if type(handler) is logging.StreamHandler:
                    handler.setLevel(value)


_manager: Optional[LoggerManager] = None


def _current_manager() -> LoggerManager:
    global _manager
    if _manager is None:
        _manager = LoggerManager()
    return _manager


def setup_logging(config_path: Optional[Union[str, Path]] = None) -> LoggerManager:
    """(Re)install logging from a settings file"""
    global _manager
    _manager = LoggerManager(config_path)
    return _manager


def get_logger(name: str) -> logging.Logger:
    return _current_manager().get_logger(name)


def set_log_level(level: str):
    """Apply a level name (DEBUG, INFO, ...) everywhere; used by --log-level"""
    _current_manager().set_level(level)


class ProgressLogger:
    """Periodic DEBUG progress lines for per-image loops.

    Logs at start, every `every` items and at the last item; `complete`
    closes the loop with an INFO summary.
    """

    def __init__(self, logger: logging.Logger, operation: str, total: int, every: int = 1):
        self.logger = logger
        self.operation = operation
        self.total = total
        self.every = max(1, every)
        self.current = 0
        self.logger.debug(f"{operation}: {total} items")

    def update(self, increment: int = 1, message: Optional[str] = None):
        self.current += increment
        if self.current % self.every and self.current != self.total:
            return
        percent = 100.0 * self.current / self.total if self.total else 100.0
        line = f"{self.operation}: {self.current}/{self.total} ({percent:.0f}%)"
        self.logger.debug(f"{line} {message}" if message else line)

    def complete(self, message: Optional[str] = None):
        line = f"{self.operation} done ({self.current}/{self.total})"
        self.logger.info(f"{line}: {message}" if message else line)


def log_exception(logger: logging.Logger, exception: Exception, context: Optional[str] = None):
    """ERROR with traceback, prefixed by what was being done"""
    summary = f"{type(exception).__name__}: {exception}"
    logger.exception(f"{context}: {summary}" if context else summary)


def log_performance(logger: logging.Logger, operation: str, duration: float, **details):
    """INFO timing line, e.g. `evaluate: 1.234s (mode=rule, seed=42)`"""
    line = f"{operation}: {duration:.3f}s"
    if details:
        line += " (" + ", ".join(f"{k}={v}" for k, v in details.items()) + ")"
    logger.info(line)
