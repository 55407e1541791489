"""JSON schemas for the machine-readable CLI output."""

_NUMBER_OR_INF = {"oneOf": [{"type": "number"}, {"const": "inf"}]}

MIN_MASS = {
    "type": "object",
    "required": ["state", "tau", "f", "delta_m_over_m", "n_measurements"],
    "properties": {
        "state": {"type": "string"},
        "tau": {"type": "number"},
        "f": {"type": "number"},
        "delta_m_over_m": _NUMBER_OR_INF,
        "n_measurements": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}

TABLE = {
    "type": "object",
    "required": ["columns", "rows"],
    "properties": {
        "columns": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "rows": {"type": "array", "items": {"type": "array", "items": _NUMBER_OR_INF}},
    },
}

OPTIMIZE = {
    "type": "object",
    "required": ["L", "tau", "coeffs", "abs_f", "delta_m_over_m", "restarts_used", "converged", "spread", "seed"],
    "properties": {
        "L": {"type": "integer", "minimum": 0},
        "tau": {"type": "number"},
        "coeffs": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        },
        "abs_f": {"type": "number", "minimum": 0},
        "delta_m_over_m": _NUMBER_OR_INF,
        "restarts_used": {"type": "integer", "minimum": 1},
        "converged": {"type": "boolean"},
        "spread": {"type": "number", "minimum": 0},
        "seed": {"type": "integer"},
    },
}

PHYSICAL = {
    "type": "object",
    "required": ["tau", "alpha", "mean_quanta", "delta_m_over_m", "delta_m_g", "delta_m_electron_masses"],
    "properties": {
        "tau": {"type": "number"},
        "alpha": {"type": "number"},
        "mean_quanta": {"type": "number"},
        "delta_m_over_m": _NUMBER_OR_INF,
        "delta_m_g": _NUMBER_OR_INF,
        "delta_m_electron_masses": _NUMBER_OR_INF,
    },
}

WIGNER = {
    "type": "object",
    "required": ["out", "resolution", "normalization", "imag_residue"],
    "properties": {
        "out": {"type": "string"},
        "resolution": {"type": "integer", "minimum": 16},
        "normalization": {"type": "number"},
        "imag_residue": {"type": "number", "minimum": 0},
    },
}

BY_COMMAND = {
    "min-mass": MIN_MASS,
    "sweep-fig1": TABLE,
    "thermal": TABLE,
    "optimize": OPTIMIZE,
    "physical": PHYSICAL,
    "wigner": WIGNER,
}
