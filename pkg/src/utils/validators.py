"""
Schema validation for run configurations and template store manifests
"""

from typing import Any, Dict, List

import jsonschema

from .logger import get_logger

logger = get_logger(__name__)

UINT64_MAX = 2 ** 64 - 1

RUN_CONFIG_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "init_mode": {"type": "string", "enum": ["random", "rule"]},
        "inhibit_mode": {"type": "string", "enum": ["mean", "percentile"]},
        "block_h": {"type": "integer", "minimum": 1},
        "block_w": {"type": "integer", "minimum": 1},
        "region_h": {"type": "integer", "minimum": 1},
        "region_w": {"type": "integer", "minimum": 1},
        "neighborhood": {"type": "integer", "minimum": 1},
        "gamma": {"type": "integer", "minimum": 1},
        "rho": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "theta_c": {"type": "number", "minimum": 0, "maximum": 1},
        "theta_s": {"type": "number", "minimum": 0},
        "s": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "phi": {"type": "number", "exclusiveMinimum": 0},
        "eta": {"type": "number", "minimum": 0},
        "big_t": {"type": "integer", "minimum": 1},
        "perm_delta": {"type": "number", "minimum": 0, "maximum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": UINT64_MAX},
        "resize_h": {"type": "integer", "minimum": 1},
        "resize_w": {"type": "integer", "minimum": 1},
        "trials": {"type": "integer", "minimum": 1},
        "metric": {"type": "string", "enum": ["hamming", "cosine"]},
        "match": {"type": "string", "enum": ["template", "class_mean"]},
        "strict_weights": {"type": "boolean"},
        "jobs": {"type": "integer", "minimum": 1},
    },
}

STORE_MANIFEST_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["format_version", "provenance", "classes"],
    "properties": {
        "format_version": {"type": "integer", "const": 1},
        "provenance": {
            "type": "object",
            "required": ["tiling", "init_mode", "inhibit_mode", "seed", "dims"],
            "properties": {
                "tiling": {
                    "type": "object",
                    "required": ["block_size", "region_size", "neighborhood_size"],
                },
                "init_mode": {"type": "string", "enum": ["random", "rule"]},
                "inhibit_mode": {"type": "string", "enum": ["mean", "percentile"]},
                "seed": {"type": "integer", "minimum": 0, "maximum": UINT64_MAX},
                "dims": {
                    "type": "array",
                    "items": {"type": "integer", "minimum": 1},
                    "minItems": 2,
                    "maxItems": 2,
                },
            },
        },
        "classes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "templates"],
                "properties": {
                    "label": {"type": "string", "minLength": 1},
                    "templates": {
                        "type": "array",
                        "items": {"type": "string", "minLength": 1},
                        "minItems": 1,
                    },
                },
            },
        },
    },
}


class SchemaValidator:
    """JSON Schema-based validation"""

    def __init__(self):
        self.schemas = self._load_schemas()

    def _load_schemas(self) -> Dict[str, Dict]:
        """Load validation schemas"""
        return {
            "run_config": RUN_CONFIG_SCHEMA,
            "store_manifest": STORE_MANIFEST_SCHEMA,
        }

    @staticmethod
    def _error_keys(error: jsonschema.ValidationError) -> List[str]:
        """Top-level keys responsible for a validation error"""
        if error.validator == "additionalProperties" and isinstance(error.instance, dict):
            allowed = set(error.schema.get("properties", {}))
            return sorted(set(error.instance) - allowed)
        if error.path:
            return [str(error.path[0])]
        return []

    def validate_with_schema(self, data: Dict[str, Any], schema_name: str) -> Dict[str, Any]:
        """Validate data against a named JSON schema.

        Returns a dict with `valid`, `errors` (messages) and `error_keys`
        (offending top-level keys, in key order).
        """
        if schema_name not in self.schemas:
            return {
                "valid": False,
                "errors": [f"Unknown schema: {schema_name}"],
                "error_keys": [],
            }

        validator = jsonschema.Draft7Validator(self.schemas[schema_name])
        errors = sorted(validator.iter_errors(data), key=lambda e: [str(p) for p in e.path])

        messages = []
        keys: List[str] = []
        for error in errors:
            error_keys = self._error_keys(error)
            prefix = f"{', '.join(error_keys)}: " if error_keys else ""
            messages.append(f"{prefix}{error.message}")
            keys.extend(k for k in error_keys if k not in keys)

        if messages:
            logger.debug(f"Schema '{schema_name}' rejected data: {messages}")

        return {
            "valid": not messages,
            "errors": messages,
            "error_keys": keys,
        }
