"""
Filesystem, persistence and settings helpers.

Everything written here is byte-stable: directory listings are sorted,
JSON keeps insertion order with a trailing newline and CSV floats use a
fixed format with `\\n` line endings, so reruns reproduce their outputs.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Union

import pandas as pd
import yaml

from .logger import get_logger, PROJECT_ROOT

logger = get_logger(__name__)

PathLike = Union[str, Path]

CSV_FLOAT_FORMAT = "%.6f"


class FileManager:
    """Directory creation, sorted listings and cleanup"""

    @staticmethod
    def ensure_directory(path: PathLike) -> Path:
        directory = Path(path)
        directory.mkdir(parents=True, exist_ok=True)
        return directory

    @staticmethod
    def file_exists(path: PathLike) -> bool:
        return Path(path).is_file()

    @staticmethod
    def get_files_by_pattern(directory: PathLike, pattern: str) -> List[Path]:
        """Regular files in `directory` matching `pattern`, in name order"""
        matches = sorted(p for p in Path(directory).glob(pattern) if p.is_file())
        logger.debug(f"{directory}: {len(matches)} files match '{pattern}'")
        return matches

    @staticmethod
    def list_subdirectories(directory: PathLike) -> List[Path]:
        """Visible subdirectories in name order (dot-directories skipped)"""
        return sorted(p for p in Path(directory).iterdir()
                      if p.is_dir() and not p.name.startswith("."))

    @staticmethod
    def clean_directory(path: PathLike, pattern: str = "*") -> int:
        """Remove the files matching `pattern` directly inside `path`"""
        directory = Path(path)
        if not directory.is_dir():
            return 0
        removed = 0
        for item in directory.glob(pattern):
            if item.is_file():
                item.unlink()
                removed += 1
        if removed:
            logger.debug(f"Removed {removed} stale files from {directory}")
        return removed


class DataLoader:
    """JSON, YAML and CSV persistence"""

    @staticmethod
    def load_json(path: PathLike) -> Any:
        """Parsed JSON; decoding problems raise ValueError"""
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)

    @staticmethod
    def save_json(data: Any, path: PathLike, indent: int = 2) -> Path:
        target = Path(path)
        FileManager.ensure_directory(target.parent)
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            json.dump(data, f, indent=indent, ensure_ascii=False)
            f.write("\n")
        logger.debug(f"Wrote {target}")
        return target

    @staticmethod
    def load_yaml(path: PathLike) -> Dict[str, Any]:
        try:
            with open(path, "r", encoding="utf-8") as f:
                return yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            logger.error(f"Cannot parse YAML {path}: {e}")
            raise

    @staticmethod
    def save_csv(frame: pd.DataFrame, path: PathLike,
                 float_format: str = CSV_FLOAT_FORMAT) -> Path:
        target = Path(path)
        FileManager.ensure_directory(target.parent)
        frame.to_csv(target, index=False, float_format=float_format, lineterminator="\n")
        logger.debug(f"Wrote {target}: {len(frame)} rows")
        return target


class ConfigLoader:
    """config/settings.yaml with dot-path lookups, plus flat run files"""

    def __init__(self, config_dir: Union[PathLike, None] = None):
        self.config_dir = Path(config_dir) if config_dir else PROJECT_ROOT / "config"
        self._settings: Union[Dict[str, Any], None] = None

    def load_settings(self, reload: bool = False) -> Dict[str, Any]:
        """Parsed settings.yaml; empty when the file is absent"""
        if self._settings is None or reload:
            settings_path = self.config_dir / "settings.yaml"
            if settings_path.is_file():
                self._settings = DataLoader.load_yaml(settings_path)
            else:
                logger.warning(f"No settings file at {settings_path}, using built-in defaults")
                self._settings = {}
        return self._settings

    def get_setting(self, key_path: str, default: Any = None) -> Any:
        """Nested lookup, e.g. get_setting('bench.sweep_region_sizes')"""
        node: Any = self.load_settings()
        for part in key_path.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    @staticmethod
    def load_key_values(path: PathLike) -> Dict[str, str]:
        """Read `key = value` lines; `#` starts a comment.

        Raises ValueError naming path and line for a line without '=' or a
        repeated key.
        """
        values: Dict[str, str] = {}
        with open(path, "r", encoding="utf-8") as f:
            for line_no, raw in enumerate(f, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, value = line.partition("=")
                key = key.strip()
                if not sep or not key:
                    raise ValueError(f"{path}:{line_no}: expected 'key = value', got {raw.strip()!r}")
                if key in values:
                    raise ValueError(f"{path}:{line_no}: duplicate key '{key}'")
                values[key] = value.strip()
        logger.debug(f"Read {len(values)} keys from {path}")
        return values
