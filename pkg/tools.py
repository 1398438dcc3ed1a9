"""
Spectralab Tools
RunConfig schema, the lab task registry and the parsers shared by the CLI and the dispatcher
"""

import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import jsonschema

from errors import ConfigError

# ==================== SCHEMA BLOCKS ====================

RATIONAL = {
    "type": ["string", "integer"],
    "description": "Exact rational, e.g. '6/5' or 1"
}

EXPONENT = {
    "type": ["string", "number"],
    "description": "Lebesgue exponent as a rational string ('6/5'), a number, or 'inf'"
}

COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "string"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
    ],
    "description": "Complex number as a real, '1+2j', or [re, im]"
}

NUMBER_LIST = {"type": "array", "items": {"type": "number"}, "minItems": 1}
COMPLEX_LIST = {"type": "array", "items": COMPLEX, "minItems": 1}

SYMBOL_SCHEMA = {
    "type": "object",
    "description": "Elliptic homogeneous symbol: a built-in or explicit monomial terms",
    "properties": {
        "builtin": {"type": "string", "enum": ["laplacian_pow_k", "norm_power_m"]},
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 2},
        "k": {"type": "integer", "minimum": 1},
        "terms": {
            "type": "array",
            "items": {"type": "array", "minItems": 2, "maxItems": 2},
            "description": "[[multi_index, coefficient], ...]"
        },
        "name": {"type": "string"}
    },
    "required": ["n"],
    "additionalProperties": False
}

GRID_SCHEMA = {
    "type": "object",
    "description": "Periodic grid of N^n points on the torus of side L",
    "properties": {
        "n": {"type": "integer", "minimum": 1, "maximum": 3},
        "N": {"type": "integer", "minimum": 2},
        "L": {"type": "number", "exclusiveMinimum": 0}
    },
    "required": ["n", "N", "L"],
    "additionalProperties": False
}

REGION_SCHEMA = {
    "type": "object",
    "properties": {
        "case": {
            "type": ["integer", "string"],
            "description": "1-4 for the negative-index cases, or 'krs', 'sobolev', 'restriction'"
        },
        "n": {"type": "integer", "minimum": 2},
        "m": {"type": "integer", "minimum": 2},
        "alpha": RATIONAL,
        "p": RATIONAL,
        "p0": RATIONAL,
        "gaussian_bounds": {"type": "boolean"},
        "extended_case4": {"type": "boolean"},
        "query": {"type": "string", "description": "Point '1/r,1/s' to test for membership"}
    },
    "additionalProperties": False
}

SWEEP_KINDS = [
    "sobolev",
    "restriction",
    "bochner-riesz",
    "gaussian",
    "davies-gaffney",
    "multiplier",
    "resolvent-power",
    "perturbed-resolvent",
]

SWEEP_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"type": "string", "enum": SWEEP_KINDS},
        "p": EXPONENT,
        "q": EXPONENT,
        "alpha": {"type": "number"},
        "z_list": COMPLEX_LIST,
        "lambda_list": NUMBER_LIST,
        "t_list": NUMBER_LIST,
        "R_list": NUMBER_LIST,
        "arguments": {**NUMBER_LIST, "description": "arg z values for generated z lists"},
        "decades": {"type": "number", "exclusiveMinimum": 0},
        "points": {"type": "integer", "minimum": 2},
        "width": {"type": "number", "exclusiveMinimum": 0},
        "eps": {"type": "number", "exclusiveMinimum": 0},
        "compare_free": {"type": "boolean"}
    },
    "additionalProperties": False
}

PERTURB_SCHEMA = {
    "type": "object",
    "properties": {
        "z": COMPLEX,
        "lam": {"type": "number"},
        "eps": {"type": "number", "exclusiveMinimum": 0},
        "p": EXPONENT,
        "k_max": {"type": "integer", "minimum": 1},
        "tol": {"type": "number", "exclusiveMinimum": 0}
    },
    "additionalProperties": False
}

WEYL_SCHEMA = {
    "type": "object",
    "properties": {
        "alpha_list": NUMBER_LIST,
        "nu_list": NUMBER_LIST,
        "h": {"type": "number", "exclusiveMinimum": 0}
    },
    "additionalProperties": False
}

VERIFY_SCHEMA = {
    "type": "object",
    "properties": {
        "filter": {
            "type": "array",
            "items": {"type": "string", "enum": ["region", "symbol", "grid", "weyl", "resolvent", "perturbation"]}
        }
    },
    "additionalProperties": False
}

TOLERANCES_SCHEMA = {
    "type": "object",
    "properties": {
        "slope": {"type": "number", "exclusiveMinimum": 0},
        "r2": {"type": "number", "minimum": 0, "maximum": 1},
        "ratio": {"type": "number", "exclusiveMinimum": 1}
    },
    "additionalProperties": False
}

RUN_CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "RunConfig",
    "type": "object",
    "properties": {
        "symbol": SYMBOL_SCHEMA,
        "grid": GRID_SCHEMA,
        "region": REGION_SCHEMA,
        "sweep": SWEEP_SCHEMA,
        "potential": {
            "type": ["string", "object", "null"],
            "description": "'zero', 'ball:c,r', 'gaussian:c,sigma', 'inverse_square:c', a .npy path or an object"
        },
        "perturb": PERTURB_SCHEMA,
        "weyl": WEYL_SCHEMA,
        "verify": VERIFY_SCHEMA,
        "tolerances": TOLERANCES_SCHEMA,
        "seed": {"type": "integer", "minimum": 0},
        "output_dir": {"type": "string", "minLength": 1},
        "threads": {"type": "integer", "minimum": 1}
    },
    "additionalProperties": False
}


# ==================== TASK REGISTRY ====================

# One entry per lab task; parameters name the RunConfig blocks each task reads
LAB_TASKS = [
    {
        "type": "task",
        "task": {
            "name": "region",
            "description": "Compute an exponent region with exact rationals and write its polygon. Optionally test one point for membership.",
            "parameters": {
                "type": "object",
                "properties": {"region": REGION_SCHEMA},
                "required": ["region"]
            }
        }
    },
    {
        "type": "task",
        "task": {
            "name": "verify",
            "description": "Run the deterministic identity suites and report PASS/FAIL per check. Exit code 1 if any check fails.",
            "parameters": {
                "type": "object",
                "properties": {"symbol": SYMBOL_SCHEMA, "verify": VERIFY_SCHEMA},
                "required": []
            }
        }
    },
    {
        "type": "task",
        "task": {
            "name": "sweep",
            "description": "Measure operator norm lower bounds across a parameter sweep and fit the scaling exponent against its prediction.",
            "parameters": {
                "type": "object",
                "properties": {
                    "symbol": SYMBOL_SCHEMA,
                    "grid": GRID_SCHEMA,
                    "sweep": SWEEP_SCHEMA,
                    "potential": RUN_CONFIG_SCHEMA["properties"]["potential"],
                    "tolerances": TOLERANCES_SCHEMA
                },
                "required": ["sweep"]
            }
        }
    },
    {
        "type": "task",
        "task": {
            "name": "perturb",
            "description": "Check the Neumann-series resolvent against the dense solve and the Stone density against the eigendecomposition for a potential.",
            "parameters": {
                "type": "object",
                "properties": {
                    "symbol": SYMBOL_SCHEMA,
                    "grid": GRID_SCHEMA,
                    "potential": RUN_CONFIG_SCHEMA["properties"]["potential"],
                    "perturb": PERTURB_SCHEMA
                },
                "required": []
            }
        }
    },
    {
        "type": "task",
        "task": {
            "name": "weyl",
            "description": "Run the one-dimensional distribution calculus identities and resolve the sign convention of the boundary jump identity.",
            "parameters": {
                "type": "object",
                "properties": {"weyl": WEYL_SCHEMA},
                "required": []
            }
        }
    },
]

TASK_NAMES = [entry["task"]["name"] for entry in LAB_TASKS]


def task_schema(name: str) -> Dict:
    for entry in LAB_TASKS:
        if entry["task"]["name"] == name:
            return entry["task"]
    raise ConfigError(f"unknown task {name!r}; known: {TASK_NAMES}")


# ==================== PARSERS ====================

def parse_rational(value: Union[str, int, Fraction]) -> Fraction:
    """Exact rational from '6/5', 3 or a Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise ConfigError(f"exact rational required, got {value!r}")
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"malformed rational {value!r}") from exc


def parse_exponent(value: Union[str, int, float]) -> float:
    """Lebesgue exponent in [1, inf]"""
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "∞"):
        return math.inf
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        p = float(value)
    else:
        p = float(parse_rational(value))
    if not p >= 1:
        raise ConfigError(f"exponent must lie in [1, inf], got {value!r}")
    return p


def parse_complex(value: Union[str, int, float, List[float]]) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"complex value needs [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError as exc:
            raise ConfigError(f"malformed complex number {value!r}") from exc
    return complex(value)


def parse_point(text: str) -> Tuple[Fraction, Fraction]:
    """'1/2,1/3' -> (1/2, 1/3)"""
    parts = [part for part in str(text).split(",") if part.strip()]
    if len(parts) != 2:
        raise ConfigError(f"point must be '1/r,1/s', got {text!r}")
    return parse_rational(parts[0]), parse_rational(parts[1])


# ==================== VALIDATION ====================

def validate_run_config(run_config: Dict[str, Any]) -> Dict[str, Any]:
    """Schema-check a RunConfig; unknown keys are rejected"""
    try:
        jsonschema.validate(instance=run_config, schema=RUN_CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(part) for part in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid run config at {where}: {exc.message}") from exc
    return run_config


def load_run_config(path: Optional[Union[str, Path]]) -> Dict[str, Any]:
    """Read and validate a JSON RunConfig; None gives an empty config"""
    if path is None:
        return {}
    try:
        body = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(body, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return validate_run_config(body)


def apply_overrides(run_config: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Merge CLI flag values into a config; None values leave the config untouched"""
    merged = json.loads(json.dumps(run_config))
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict):
            block = dict(merged.get(key) or {})
            block.update({k: v for k, v in value.items() if v is not None})
            if block:
                merged[key] = block
        else:
            merged[key] = value
    return validate_run_config(merged)
