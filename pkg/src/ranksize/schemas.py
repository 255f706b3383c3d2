"""JSON schemas for the CLI output envelopes (draft 2020-12)."""

from .models import FAMILIES
from .optimizer import TERMINATIONS
from .ingest import VERDICTS

_number_or_null = {"type": ["number", "null"]}
_interval = {"type": ["array", "null"], "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}

FIT_RESULT = {
    "type": "object",
    "required": ["model", "params", "chi_square", "r_squared", "dof", "dof_conventional",
                 "iterations", "converged", "termination", "n_points", "rank_offset"],
    "properties": {
        "model": {
            "type": "object",
            "required": ["family", "n_context"],
            "properties": {
                "family": {"enum": list(FAMILIES)},
                "n_context": {"type": ["integer", "null"]},
            },
        },
        "params": {"type": "object", "additionalProperties": {"type": "number"}},
        "chi_square": {"type": "number", "minimum": 0},
        "r_squared": {"type": ["number", "null"], "maximum": 1},
        "dof": {"type": "integer"},
        "dof_conventional": {"type": "integer"},
        "iterations": {"type": "integer", "minimum": 0},
        "converged": {"type": "boolean"},
        "termination": {"enum": list(TERMINATIONS)},
        "n_points": {"type": "integer", "minimum": 1},
        "rank_offset": {"type": "integer", "minimum": 0},
    },
}

SUMMARY_STATS = {
    "type": "object",
    "required": ["n", "minimum", "maximum", "mean", "median", "rms", "variance", "std_error",
                 "skewness", "kurtosis_excess", "mean_over_sigma"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "minimum": {"type": "number"},
        "maximum": {"type": "number"},
        "mean": {"type": "number"},
        "median": {"type": "number"},
        "rms": {"type": "number", "minimum": 0},
        "variance": {"type": "number", "minimum": 0},
        "std_error": {"type": "number", "minimum": 0},
        "skewness": _number_or_null,
        "kurtosis_excess": _number_or_null,
        "mean_over_sigma": _number_or_null,
    },
    "additionalProperties": False,
}

SEGMENTATION = {
    "type": "object",
    "required": ["n", "r1", "shoulder_rank", "classes", "top_fit", "middle_fit", "warnings"],
    "properties": {
        "n": {"type": "integer"},
        "r1": {"type": "integer", "minimum": 0},
        "shoulder_rank": {"type": ["integer", "null"]},
        "classes": {
            "type": "object",
            "required": ["top", "middle", "tail"],
            "properties": {"top": _interval, "middle": _interval, "tail": _interval},
        },
        "top_fit": {"oneOf": [FIT_RESULT, {"type": "null"}]},
        "middle_fit": FIT_RESULT,
        "warnings": {"type": "array", "items": {"type": "string"}},
    },
}

MOTION = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["label", "rank_a", "rank_b", "verdict"],
        "properties": {
            "label": {"type": "string"},
            "rank_a": {"type": ["integer", "null"]},
            "rank_b": {"type": ["integer", "null"]},
            "verdict": {"enum": list(VERDICTS)},
        },
    },
}

SYNTH = {
    "type": "object",
    "required": ["path", "n", "model", "params", "noise", "output_fingerprint"],
    "properties": {
        "path": {"type": "string"},
        "n": {"type": "integer", "minimum": 3},
        "model": {"enum": list(FAMILIES)},
        "params": {"type": "object", "additionalProperties": {"type": "number"}},
        "noise": {
            "type": "object",
            "required": ["kind", "sigma", "seed"],
            "properties": {
                "kind": {"enum": ["none", "multiplicative_gaussian"]},
                "sigma": {"type": "number", "minimum": 0},
                "seed": {"type": "integer", "minimum": 0},
            },
        },
        "top": {"type": ["object", "null"]},
        "tail": {"type": ["object", "null"]},
        "output_fingerprint": {"type": "string"},
    },
}

RESULT_SCHEMAS = {
    "stats": SUMMARY_STATS,
    "fit": FIT_RESULT,
    "segment": SEGMENTATION,
    "synth": SYNTH,
    "motion": MOTION,
}


def envelope_schema(command: str) -> dict:
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["command", "input_fingerprint", "result", "warnings"],
        "properties": {
            "command": {"const": command},
            "input_fingerprint": {"type": ["string", "null"], "pattern": "^sha256:[0-9a-f]{64}$"},
            "result": RESULT_SCHEMAS[command],
            "warnings": {"type": "array", "items": {"type": "string"}},
        },
        "additionalProperties": False,
    }
