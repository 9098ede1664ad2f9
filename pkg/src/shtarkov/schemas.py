"""JSON Schemas for every ``--json`` output of the command line."""

NUMBER_OR_NULL = {"type": ["number", "null"]}
UNITS = {"enum": ["bits", "nats"]}

POISSON_CLASS = {
    "type": "object",
    "required": ["lambda", "units", "s", "bits", "lower", "upper", "exact"],
    "additionalProperties": False,
    "properties": {
        "lambda": {"type": "number", "minimum": 0},
        "units": UNITS,
        "s": {"type": "number", "minimum": 1},
        "bits": {"type": "number", "minimum": 0},
        "lower": {"type": "number"},
        "upper": {"type": "number"},
        "exact": {"type": "boolean"},
    },
}

_INTERVAL = {
    "type": "object",
    "required": ["method", "lower", "upper", "truncation", "asymptotic", "note"],
    "additionalProperties": False,
    "properties": {
        "method": {"enum": ["single-letter", "bgg09", "closed-form"]},
        "lower": {"type": "number"},
        "upper": {"type": "number"},
        "truncation": {"type": "number", "minimum": 0},
        "asymptotic": {"type": "boolean"},
        "note": {"type": "string"},
    },
}

ENVELOPE = {
    "type": "object",
    "required": ["envelope", "n", "units", "results"],
    "additionalProperties": False,
    "properties": {
        "envelope": {"type": "object"},
        "n": {"type": "integer", "minimum": 1},
        "units": UNITS,
        "results": {"type": "array", "items": _INTERVAL, "minItems": 1},
    },
}

IID = {
    "type": "object",
    "required": ["k", "n", "units", "exact", "upper", "lower_chain"],
    "additionalProperties": False,
    "properties": {
        "k": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "units": UNITS,
        "exact": NUMBER_OR_NULL,
        "upper": NUMBER_OR_NULL,
        "lower_chain": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "required": ["value", "n_prime", "advisory"],
                    "additionalProperties": False,
                    "properties": {
                        "value": {"type": "number"},
                        "n_prime": {"type": "number"},
                        "advisory": {"type": "boolean"},
                    },
                },
            ]
        },
    },
}

VERIFY = {
    "type": "object",
    "required": ["suite", "seed", "passed", "checks"],
    "additionalProperties": False,
    "properties": {
        "suite": {"enum": ["all", "preliminary", "poisson", "envelope"]},
        "seed": {"type": "integer"},
        "passed": {"type": "boolean"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "instances", "worst_violation", "tolerance", "passed"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "instances": {"type": "integer", "minimum": 0},
                    "worst_violation": NUMBER_OR_NULL,
                    "tolerance": {"type": "number"},
                    "passed": {"type": "boolean"},
                },
            },
        },
    },
}

SCHEMAS = {
    "poisson-class": POISSON_CLASS,
    "envelope": ENVELOPE,
    "iid": IID,
    "verify": VERIFY,
}
