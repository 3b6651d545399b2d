"""Built-in configurations used by ``verify`` and the test-suite.

Each preset is a plain JSON document so it goes through the same validation as
user input.
"""

import copy
import math

from .config import config_from_dict

HALF_PI = math.pi / 2

# constant coefficients, invariant started on the field direction
FIXED_POINT = {
    "label": {"n1": 2, "n2": 1},
    "detector": {"omega1": 1.3, "omega2": 0.4},
    "levels": [{"E": 0.2, "g": {"amplitude": 0.35, "phase": 0.6}}],
    "grid": {"t0": 0.0, "t1": 10.0, "steps": 10000},
    "initial_state": {"kind": "vector", "vector": [[0.5, 0.1], [0.3, -0.4], [-0.2, 0.5], [0.4, 0.2]]},
}

# coupling with a modulated modulus and a linearly advancing phase
SINUSOIDAL = {
    "label": {"n1": 2, "n2": 2},
    "detector": {"omega1": 0.8, "omega2": 0.2},
    "levels": [
        {
            "E": 0.1,
            "g": {
                "amplitude": {"type": "sum", "parts": [0.8, {"type": "cosine", "A": 0.3, "Omega": 0.7, "delta": 0.0}]},
                "phase": {"type": "linear", "a": 0.0, "b": 0.25},
            },
        }
    ],
    "grid": {"t0": 0.0, "t1": 10.0, "steps": 10000},
    "initial_state": {
        "kind": "vector",
        "vector": [[0.3, 0.2], [-0.1, 0.4], [0.5, 0.0], [0.2, -0.3], [0.1, 0.35]],
    },
}

# H = c J2 + f with c = 1: omega1 = omega2, g = -i c / 2
SPECIAL_CASE = {
    "label": {"n1": 4, "n2": 2},
    "detector": {"omega1": 0.5, "omega2": 0.5},
    "levels": [{"E": 0.3, "g": {"amplitude": 0.5, "phase": -HALF_PI}, "aux_init": {"lambda0": 0.1, "gamma0": 0.0}}],
    "grid": {"t0": 0.0, "t1": 10.0, "steps": 10000},
    "initial_state": {
        "kind": "vector",
        "vector": [[0.2, 0.1], [0.4, -0.2], [-0.3, 0.1], [0.1, 0.3], [0.25, 0.0], [-0.1, -0.2], [0.3, 0.15]],
    },
}

# two pure-J2 branches with c_k - c_l = 2, so the separation angle equals t
SPECIAL_PAIR = {
    "label": {"n1": 1, "n2": 0},
    "detector": {"omega1": 0.5, "omega2": 0.5},
    "levels": [
        {"E": 0.0, "g": {"amplitude": 1.25, "phase": -HALF_PI}, "aux_init": {"lambda0": 0.1, "gamma0": 0.0}},
        {"E": 0.4, "g": {"amplitude": 0.25, "phase": -HALF_PI}, "aux_init": {"lambda0": 0.1, "gamma0": 0.0}},
    ],
    "grid": {"t0": 0.0, "t1": 2 * math.pi, "steps": 1024},
}

# static field along J3 with the invariant tilted by pi/3: gamma' = 1, one period = 2 pi
PRECESSION = {
    "label": {"n1": 3, "n2": 0},
    "detector": {"omega1": 1.0, "omega2": 0.0},
    "levels": [{"E": 0.0, "g": {"amplitude": 0.0}, "aux_init": {"lambda0": math.pi / 3, "gamma0": 0.0}}],
    "grid": {"t0": 0.0, "t1": 2 * math.pi, "steps": 1000},
}

# no coupling at all: the invariant sits on the pole
UNCOUPLED = {
    "label": {"n1": 2, "n2": 1},
    "detector": {"omega1": {"type": "linear", "a": 1.0, "b": 0.1}, "omega2": 0.3},
    "levels": [{"E": {"type": "cosine", "A": 0.2, "Omega": 1.0, "delta": 0.0}, "g": {"amplitude": 0.0}}],
    "grid": {"t0": 0.0, "t1": 5.0, "steps": 2000},
    "initial_state": {"kind": "vector", "vector": [[0.5, 0.0], [0.5, 0.1], [0.0, 0.5], [0.3, 0.4]]},
}

PRESETS = {
    "fixed_point": FIXED_POINT,
    "sinusoidal": SINUSOIDAL,
    "special_case": SPECIAL_CASE,
    "special_pair": SPECIAL_PAIR,
    "precession": PRECESSION,
    "uncoupled": UNCOUPLED,
}


def preset(name, **overrides):
    """Parsed preset; ``overrides`` replace top-level keys of the document."""
    doc = copy.deepcopy(PRESETS[name])
    doc.update(copy.deepcopy(overrides))
    return config_from_dict(doc)


def preset_doc(name):
    return copy.deepcopy(PRESETS[name])
