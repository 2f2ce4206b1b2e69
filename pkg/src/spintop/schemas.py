"""JSON Schemas of the command configs.  Unknown keys are rejected."""

from __future__ import annotations

NUMBER = {"type": "number"}
POSITIVE = {"type": "number", "exclusiveMinimum": 0}
VEC3 = {"type": "array", "items": NUMBER, "minItems": 3, "maxItems": 3}
VEC4 = {"type": "array", "items": NUMBER, "minItems": 4, "maxItems": 4}
VEC6 = {"type": "array", "items": NUMBER, "minItems": 6, "maxItems": 6}
SEED = {"type": "integer", "minimum": 0}


def _obj(properties: dict, required=()) -> dict:
    return {"type": "object", "properties": properties, "required": list(required), "additionalProperties": False}


MODEL = _obj(
    {
        "family": {"enum": ["generic", "developable", "rotator", "legendre"]},
        "params": {"type": "object"},
    },
    ["family"],
)

RANGE = {"type": "array", "prefixItems": [NUMBER, NUMBER, {"type": "integer", "minimum": 1}], "minItems": 3, "maxItems": 3}

CASIMIR = _obj({"model": MODEL, "grid": _obj({"x": RANGE, "y": RANGE}, ["x", "y"])}, ["model", "grid"])

HESSIAN = _obj(
    {
        "model": MODEL,
        "m": POSITIVE,
        "ell": POSITIVE,
        "state": _obj({"q": VEC6, "qdot": VEC6}, ["q", "qdot"]),
        "step": _obj({"base": POSITIVE, "max_disagreement": POSITIVE}),
        "tau_rank": POSITIVE,
    },
    ["model", "state"],
)

FUNDCHECK = _obj(
    {
        "model": MODEL,
        "n": {"type": "integer", "minimum": 1},
        "seed": SEED,
    },
    ["model"],
)

GAUGE_FN = {
    "oneOf": [
        NUMBER,
        _obj({"const": NUMBER}, ["const"]),
        _obj({"polynomial": {"type": "array", "items": NUMBER, "minItems": 1}}, ["polynomial"]),
        _obj(
            {
                "sinusoid": _obj(
                    {"amplitude": NUMBER, "frequency": NUMBER, "phase": NUMBER, "offset": NUMBER},
                    ["amplitude", "frequency"],
                )
            },
            ["sinusoid"],
        ),
    ]
}

GAUGE = _obj({"c_t": GAUGE_FN, "c_phi": GAUGE_FN}, ["c_t", "c_phi"])

INITIAL = _obj({"x": VEC4, "p": VEC4, "k": VEC4, "pi": VEC4}, ["p", "k", "pi"])

SPAN = {"type": "array", "items": NUMBER, "minItems": 2, "maxItems": 2}

_RUN = {
    "m": POSITIVE,
    "ell": POSITIVE,
    "initial": INITIAL,
    "span": SPAN,
    "rtol": POSITIVE,
    "atol": POSITIVE,
    "n_samples": {"type": "integer", "minimum": 2},
}

INTEGRATE = _obj({**_RUN, "gauge": GAUGE}, ["m", "ell", "initial", "gauge", "span"])

TUBE = _obj({**_RUN, "gauges": {"type": "array", "items": GAUGE, "minItems": 1}}, ["m", "ell", "initial", "gauges", "span"])

SPINOR = _obj(
    {
        "u": {"type": "array", "items": {"type": ["number", "string"]}, "minItems": 2, "maxItems": 2},
        "lambdas": {"type": "array", "items": NUMBER},
        "n_points": {"type": "integer", "minimum": 3},
    },
    ["u"],
)

DOF = _obj(
    {
        "n_v": {"type": "integer", "minimum": 0},
        "n_i": {"type": "integer", "minimum": 0},
        "n_ii": {"type": "integer", "minimum": 0},
        "casimir_constraints": {"enum": [1, 2]},
    },
    ["n_v", "n_i", "n_ii"],
)
