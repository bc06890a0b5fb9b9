"""
Run configuration: flat `key = value` settings layered as

    built-in defaults < settings.yaml `defaults:` < config file < flags

then type-coerced, schema-checked and turned into an ExperimentConfig.
"""

from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

try:
    from ..bench import ExperimentConfig
    from ..imaging import TilingError, TilingSpec
    from ..pooler import ConfigError, SpConfig
    from ..utils import get_logger, ConfigLoader, SchemaValidator
except ImportError:
    from bench import ExperimentConfig
    from imaging import TilingError, TilingSpec
    from pooler import ConfigError, SpConfig
    from utils import get_logger, ConfigLoader, SchemaValidator

logger = get_logger(__name__)

KEY_TYPES: Dict[str, type] = {
    "init_mode": str, "inhibit_mode": str,
    "block_h": int, "block_w": int, "region_h": int, "region_w": int, "neighborhood": int,
    "gamma": int, "rho": float, "theta_c": float, "theta_s": float, "s": float,
    "phi": float, "eta": float, "big_t": int, "perm_delta": float, "seed": int,
    "resize_h": int, "resize_w": int, "trials": int,
    "metric": str, "match": str, "strict_weights": bool, "jobs": int,
}

DEFAULTS: Dict[str, Any] = {
    "init_mode": "rule", "inhibit_mode": "mean",
    "block_h": 8, "block_w": 8, "region_h": 4, "region_w": 4, "neighborhood": 3,
    "gamma": 3, "rho": 0.5, "theta_c": 0.5, "theta_s": 0.0, "s": 0.5,
    "phi": 1.5, "eta": 1.0, "big_t": 10, "perm_delta": 0.05, "seed": 42,
    "trials": 10, "metric": "hamming", "match": "template", "strict_weights": False,
    "jobs": 1,
}

# Read by the SpatialPooler class only; encode, train, eval and sweep ignore them
POOLER_ONLY_KEYS = ("gamma", "phi", "eta", "big_t", "perm_delta")

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def coerce_value(key: str, raw: Any) -> Any:
    """Typed value for a documented key; strings are parsed"""
    if key not in KEY_TYPES:
        raise ConfigError(key, "unknown configuration key")
    kind = KEY_TYPES[key]
    if not isinstance(raw, str):
        if kind is float and isinstance(raw, int) and not isinstance(raw, bool):
            return float(raw)
        return raw

    text = raw.strip()
    try:
        if kind is bool:
            lowered = text.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(text)
        if kind is int:
            return int(text, 0) if text.lower().startswith("0x") else int(text)
        if kind is float:
            return float(text)
    except ValueError:
        raise ConfigError(key, f"cannot read {raw!r} as {kind.__name__}")
    return text.lower()


def parse_size(key: str, text: str) -> Tuple[int, int]:
    """'8' -> (8, 8); '8x4' -> (8, 4)"""
    parts = str(text).lower().replace("*", "x").split("x")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise ConfigError(key, f"expected N or HxW, got {text!r}")
    if len(values) == 1:
        values = values * 2
    if len(values) != 2:
        raise ConfigError(key, f"expected N or HxW, got {text!r}")
    return values[0], values[1]


class RunConfig:
    """Validated flat run configuration"""

    def __init__(self, values: Mapping[str, Any]):
        self.values: Dict[str, Any] = {k: coerce_value(k, v) for k, v in values.items()}
        self._validate()

    @classmethod
    def from_sources(cls, config_file: Optional[Union[str, Path]] = None,
                     overrides: Optional[Mapping[str, Any]] = None,
                     config_loader: Optional[ConfigLoader] = None) -> "RunConfig":
        loader = config_loader or ConfigLoader()
        values: Dict[str, Any] = dict(DEFAULTS)

        settings_defaults = loader.get_setting("defaults", {}) or {}
        for key, value in settings_defaults.items():
            values[key] = coerce_value(key, value)

        jobs_setting = loader.get_setting("processing.max_workers")
        if jobs_setting and "jobs" not in settings_defaults:
            values["jobs"] = int(jobs_setting)

        if config_file is not None:
            try:
                from_file = ConfigLoader.load_key_values(config_file)
            except ValueError as e:
                raise ConfigError("config", str(e))
            for key, value in from_file.items():
                values[key] = coerce_value(key, value)
            logger.debug(f"Applied {len(from_file)} keys from {config_file}")

        for key, value in (overrides or {}).items():
            if value is not None:
                values[key] = coerce_value(key, value)

        run = cls(values)
        ignored = run.pooler_only_overrides()
        if ignored:
            logger.debug(f"{', '.join(ignored)} only affect the SpatialPooler class, "
                         f"not the encode/train/eval/sweep commands")
        return run

    def _validate(self):
        result = SchemaValidator().validate_with_schema(self.values, "run_config")
        if not result["valid"]:
            key = result["error_keys"][0] if result["error_keys"] else "config"
            raise ConfigError(key, "; ".join(result["errors"]))
        if ("resize_h" in self.values) != ("resize_w" in self.values):
            raise ConfigError("resize_h" if "resize_w" in self.values else "resize_w",
                              "resize_h and resize_w must be given together")
        # Range checks beyond the schema
        self.sp_config()
        self.tiling()

    def pooler_only_overrides(self) -> List[str]:
        """Pooler-only keys set away from their defaults"""
        return [key for key in POOLER_ONLY_KEYS if self.values[key] != DEFAULTS[key]]

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self.values.get(key, default)

    def sp_config(self) -> SpConfig:
        v = self.values
        return SpConfig(
            gamma=v["gamma"], rho=v["rho"], theta_c=v["theta_c"], theta_s=v["theta_s"],
            s=v["s"], phi=v["phi"], eta=v["eta"], big_t=v["big_t"],
            perm_delta=v["perm_delta"], init_mode=v["init_mode"],
            inhibit_mode=v["inhibit_mode"], seed=v["seed"],
        )

    def tiling(self) -> TilingSpec:
        v = self.values
        try:
            return TilingSpec((v["block_h"], v["block_w"]), (v["region_h"], v["region_w"]),
                              v["neighborhood"])
        except TilingError as e:
            key = {"block_size": "block_h", "region_size": "region_h"}.get(e.key, e.key)
            raise ConfigError(key, str(e))

    def resize(self) -> Optional[Tuple[int, int]]:
        if "resize_h" not in self.values:
            return None
        return self.values["resize_h"], self.values["resize_w"]

    def to_experiment(self) -> ExperimentConfig:
        return ExperimentConfig(
            sp=self.sp_config(), tiling=self.tiling(), resize=self.resize(),
            metric=self.values["metric"], match=self.values["match"],
            strict_weights=self.values["strict_weights"], trials=self.values["trials"],
            jobs=self.values["jobs"],
        )
