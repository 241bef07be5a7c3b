"""Experiment configuration parsing, strict validation, and run manifests."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .exceptions import ConfigurationError

EXPERIMENTS = ("path-scan", "invariants", "boundary", "transport", "wannier", "oracle-suite")

_MODEL_SCHEMAS = {
    "kitaev_chain": {
        "type": "object",
        "properties": {
            "v": {"type": "integer", "minimum": 2},
            "t": {"type": "number"},
            "delta": {"type": "number"},
            "mu_chem": {"type": "number"},
            "periodic": {"type": "boolean"},
            "disorder": {"type": "number", "minimum": 0},
            "seed": {"type": "integer"},
        },
        "required": ["v"],
        "additionalProperties": False,
    },
    "pplusip": {
        "type": "object",
        "properties": {
            "lx": {"type": "integer", "minimum": 2},
            "ly": {"type": "integer", "minimum": 2},
            "t": {"type": "number"},
            "delta": {"type": "number"},
            "mu_chem": {"type": "number"},
            "periodic": {"type": "boolean"},
        },
        "required": ["lx", "ly"],
        "additionalProperties": False,
    },
    "chern_insulator": {
        "type": "object",
        "properties": {
            "lx": {"type": "integer", "minimum": 2},
            "ly": {"type": "integer", "minimum": 2},
            "mass": {"type": "number"},
            "periodic": {"type": "boolean"},
        },
        "required": ["lx", "ly"],
        "additionalProperties": False,
    },
    "staggered_chain": {
        "type": "object",
        "properties": {
            "v": {"type": "integer", "minimum": 2},
            "t": {"type": "number"},
            "stagger": {"type": "number", "exclusiveMinimum": 0},
            "periodic": {"type": "boolean"},
            "disorder": {"type": "number", "minimum": 0},
            "seed": {"type": "integer"},
        },
        "required": ["v"],
        "additionalProperties": False,
    },
    "trivial": {
        "type": "object",
        "properties": {
            "v": {"type": "integer", "minimum": 2},
            "gap": {"type": "number", "exclusiveMinimum": 0},
        },
        "required": ["v", "gap"],
        "additionalProperties": False,
    },
}

_MODEL_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"enum": sorted(_MODEL_SCHEMAS)},
        "params": {"type": "object"},
    },
    "required": ["name", "params"],
    "additionalProperties": False,
}

_SCHEMAS = {
    "path-scan": {
        "type": "object",
        "properties": {
            "experiment": {"const": "path-scan"},
            "name": {"type": "string", "minLength": 1},
            "seed": {"type": "integer"},
            "model": _MODEL_SCHEMA,
            "grid": {
                "type": "object",
                "properties": {"points": {"type": "integer", "minimum": 2}},
                "required": ["points"],
                "additionalProperties": False,
            },
            "mu": {"type": "number", "exclusiveMinimum": 0},
            "invariant_stride": {"type": "integer", "minimum": 1},
            "output": {"type": "string"},
        },
        "required": ["experiment", "name", "model", "grid", "mu"],
        "additionalProperties": False,
    },
    "invariants": {
        "type": "object",
        "properties": {
            "experiment": {"const": "invariants"},
            "name": {"type": "string", "minLength": 1},
            "seed": {"type": "integer"},
            "model": _MODEL_SCHEMA,
            "grid": {
                "type": "object",
                "properties": {"points": {"type": "integer", "minimum": 2}},
                "required": ["points"],
                "additionalProperties": False,
            },
            "output": {"type": "string"},
        },
        "required": ["experiment", "name", "model", "grid"],
        "additionalProperties": False,
    },
    "boundary": {
        "type": "object",
        "properties": {
            "experiment": {"const": "boundary"},
            "name": {"type": "string", "minLength": 1},
            "seed": {"type": "integer"},
            "model": _MODEL_SCHEMA,
            "defect": {
                "type": "object",
                "properties": {
                    "bond": {
                        "type": "array",
                        "items": {"type": "integer", "minimum": 0},
                        "minItems": 2,
                        "maxItems": 2,
                    },
                    "factor": {"type": "number"},
                },
                "required": ["bond", "factor"],
                "additionalProperties": False,
            },
            "subset_size": {"type": "integer", "minimum": 1},
            "margins": {
                "type": "array",
                "items": {"type": "integer", "minimum": 0},
                "minItems": 2,
            },
            "mu": {"type": "number", "exclusiveMinimum": 0},
            "xi_prime": {"type": "number", "exclusiveMinimum": 0},
            "output": {"type": "string"},
        },
        "required": ["experiment", "name", "model", "defect", "subset_size", "margins", "mu"],
        "additionalProperties": False,
    },
    "transport": {
        "type": "object",
        "properties": {
            "experiment": {"const": "transport"},
            "name": {"type": "string", "minLength": 1},
            "seed": {"type": "integer"},
            "model": _MODEL_SCHEMA,
            "steps": {"type": "integer", "minimum": 2},
            "variant": {"enum": ["exact", "filtered"]},
            "widths": {
                "type": "array",
                "items": {"type": "number", "exclusiveMinimum": 0},
                "minItems": 1,
            },
            "tolerance": {"type": "number", "exclusiveMinimum": 0},
            "profile_s": {"type": "number", "minimum": 0, "maximum": 1},
            "output": {"type": "string"},
        },
        "required": ["experiment", "name", "model", "steps", "variant"],
        "additionalProperties": False,
    },
    "wannier": {
        "type": "object",
        "properties": {
            "experiment": {"const": "wannier"},
            "name": {"type": "string", "minLength": 1},
            "seed": {"type": "integer"},
            "model": _MODEL_SCHEMA,
            "sizes": {
                "type": "array",
                "items": {"type": "integer", "minimum": 4},
                "minItems": 2,
            },
            "output": {"type": "string"},
        },
        "required": ["experiment", "name", "model", "sizes"],
        "additionalProperties": False,
    },
    "oracle-suite": {
        "type": "object",
        "properties": {
            "experiment": {"const": "oracle-suite"},
            "name": {"type": "string", "minLength": 1},
            "seed": {"type": "integer"},
            "output": {"type": "string"},
        },
        "required": ["experiment", "name"],
        "additionalProperties": False,
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    raw: dict = field(repr=False)

    @property
    def experiment(self) -> str:
        return self.raw["experiment"]

    @property
    def name(self) -> str:
        return self.raw["name"]

    @property
    def seed(self) -> int:
        return self.raw.get("seed", 0)

    @property
    def output(self) -> str | None:
        return self.raw.get("output")

    def get(self, key, default=None):
        return self.raw.get(key, default)

    def hash(self) -> str:
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def validate_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigurationError("config must be a JSON object")
    exp = raw.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigurationError(f"unknown experiment {exp!r}; expected one of {EXPERIMENTS}")
    try:
        jsonschema.validate(raw, _SCHEMAS[exp])
        if "model" in raw:
            model = raw["model"]
            jsonschema.validate(model["params"], _MODEL_SCHEMAS[model["name"]])
    except jsonschema.ValidationError as err:
        raise ConfigurationError(f"config invalid: {err.message}") from err
    return ExperimentConfig(raw)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as err:
        raise ConfigurationError(f"cannot read config: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigurationError(f"config is not valid JSON: {err}") from err
    return validate_config(raw)


@dataclass
class RunManifest:
    config_hash: str
    toolkit_version: str
    experiment: str
    name: str
    started: str
    finished: str | None = None
    passed: bool | None = None
    gates: dict = field(default_factory=dict)
    error: str | None = None
    outputs: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "config_hash": self.config_hash,
            "toolkit_version": self.toolkit_version,
            "experiment": self.experiment,
            "name": self.name,
            "started": self.started,
            "finished": self.finished,
            "passed": self.passed,
            "gates": self.gates,
            "error": self.error,
            "outputs": self.outputs,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def format_float(x: float) -> str:
    """Round-trip-exact decimal representation for CSV bodies."""
    return f"{x:.17g}"
