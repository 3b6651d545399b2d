"""JSON run configuration.

Example::

    {
      "label": {"n1": 2, "n2": 0},
      "detector": {"omega1": 0.5, "omega2": 0.5},
      "levels": [
        {"E": 0.0, "g": {"amplitude": 0.75, "phase": -1.5707963267948966},
         "aux_init": {"lambda0": 0.1, "gamma0": 0.0}},
        {"E": 0.0, "g": {"amplitude": 0.25, "phase": -1.5707963267948966},
         "aux_init": {"lambda0": 0.1, "gamma0": 0.0}}
      ],
      "grid": {"t0": 0.0, "t1": 2.0, "steps": 2000}
    }

Schedules are either numbers (constants) or tagged objects
``{"type": "constant" | "linear" | "cosine" | "sum", ...}``.
"""

import copy
import json
from dataclasses import dataclass, field
from typing import Any, List, Optional, Tuple

import jsonschema

from .errors import ConfigError
from .invariant import DEFAULT_EPS_SING, TimeGrid
from .model import ComplexSchedule, DetectorParams, LevelParams, SubspaceLabel, schedule_from_json

_NUMBER = {"type": "number"}
_COMPLEX = {
    "anyOf": [
        _NUMBER,
        {"type": "array", "items": _NUMBER, "minItems": 2, "maxItems": 2},
    ]
}
_AUX = {
    "anyOf": [
        {"const": "aligned"},
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["lambda0", "gamma0"],
            "properties": {"lambda0": _NUMBER, "gamma0": _NUMBER},
        },
    ]
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["label", "levels", "detector", "grid"],
    "$defs": {
        "schedule": {
            "anyOf": [
                _NUMBER,
                {
                    "type": "object",
                    "required": ["type"],
                    "properties": {"type": {"enum": ["constant", "linear", "cosine", "sum"]}},
                },
            ]
        }
    },
    "properties": {
        "label": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n1", "n2"],
            "properties": {
                "n1": {"type": "integer", "minimum": 0},
                "n2": {"type": "integer", "minimum": 0},
            },
        },
        "levels": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["E", "g"],
                "properties": {
                    "k": {"type": "integer", "minimum": 0},
                    "E": {"$ref": "#/$defs/schedule"},
                    "g": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["amplitude"],
                        "properties": {
                            "amplitude": {"$ref": "#/$defs/schedule"},
                            "phase": {"$ref": "#/$defs/schedule"},
                        },
                    },
                    "amplitude": _COMPLEX,
                    "aux_init": _AUX,
                },
            },
        },
        "detector": {
            "type": "object",
            "additionalProperties": False,
            "required": ["omega1", "omega2"],
            "properties": {
                "omega1": {"$ref": "#/$defs/schedule"},
                "omega2": {"$ref": "#/$defs/schedule"},
            },
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["t1", "steps"],
            "properties": {
                "t0": _NUMBER,
                "t1": _NUMBER,
                "steps": {"type": "integer", "minimum": 2},
            },
        },
        "initial_state": {
            "anyOf": [
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind"],
                    "properties": {"kind": {"const": "aligned_m"}, "two_m": {"type": "integer"}},
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "vector"],
                    "properties": {
                        "kind": {"const": "vector"},
                        "vector": {"type": "array", "items": _COMPLEX, "minItems": 1},
                    },
                },
            ]
        },
        "aux_init": _AUX,
        "eps_sing": {"type": "number", "exclusiveMinimum": 0},
        "tasks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind"],
                "properties": {"kind": {"enum": ["simulate", "decohere", "sweep"]}},
            },
        },
        "output_dir": {"type": "string"},
    },
}


@dataclass(frozen=True)
class Level:
    key: int
    params: LevelParams
    amplitude: Optional[complex]
    aux_init: Optional[Tuple[float, float]]


@dataclass(frozen=True)
class RunConfig:
    label: SubspaceLabel
    levels: Tuple[Level, ...]
    detector: DetectorParams
    grid: TimeGrid
    initial_two_m: Optional[int] = None
    initial_vector: Optional[Tuple[complex, ...]] = None
    aux_init: Optional[Tuple[float, float]] = None
    eps_sing: float = DEFAULT_EPS_SING
    tasks: Tuple[Any, ...] = ()
    output_dir: Optional[str] = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def level(self, key):
        for lv in self.levels:
            if lv.key == key:
                return lv
        raise KeyError(key)

    @property
    def level_keys(self):
        return [lv.key for lv in self.levels]

    def aux_for(self, level):
        """Explicit ``(lambda0, gamma0)`` for ``level`` or ``None`` for the aligned start."""
        return level.aux_init if level.aux_init is not None else self.aux_init

    def branch_amplitudes(self, keys=None):
        keys = self.level_keys if keys is None else list(keys)
        given = [self.level(k).amplitude for k in keys]
        if all(a is None for a in given):
            return [len(keys) ** -0.5] * len(keys)
        if any(a is None for a in given):
            raise ConfigError("levels", "branch amplitudes must be given for all levels or none")
        norm = sum(abs(a) ** 2 for a in given) ** 0.5
        return [a / norm for a in given]


def _reject_duplicates(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise ConfigError(key, "duplicate key")
        seen[key] = value
    return seen


def _path(parts):
    return ".".join(str(p) for p in parts)


def _complex(v):
    if isinstance(v, list):
        return complex(v[0], v[1])
    return complex(v)


def _aux(v):
    if v is None or v == "aligned":
        return None
    return float(v["lambda0"]), float(v["gamma0"])


def config_from_dict(doc):
    """Validate a decoded document and build a :class:`RunConfig`."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        path = _path(err.absolute_path)
        if err.validator == "additionalProperties":
            extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
            path = _path(list(err.absolute_path) + extra[:1])
            raise ConfigError(path, "unknown key")
        raise ConfigError(path or "<root>", err.message)

    label = SubspaceLabel(doc["label"]["n1"], doc["label"]["n2"])
    det = DetectorParams(
        schedule_from_json(doc["detector"]["omega1"], "detector.omega1"),
        schedule_from_json(doc["detector"]["omega2"], "detector.omega2"),
    )
    levels: List[Level] = []
    seen = set()
    for i, lv in enumerate(doc["levels"]):
        key = lv.get("k", i)
        if key in seen:
            raise ConfigError(f"levels.{i}.k", f"duplicate level key {key}")
        seen.add(key)
        g = lv["g"]
        params = LevelParams(
            schedule_from_json(lv["E"], f"levels.{i}.E"),
            ComplexSchedule(
                schedule_from_json(g["amplitude"], f"levels.{i}.g.amplitude"),
                schedule_from_json(g.get("phase", 0.0), f"levels.{i}.g.phase"),
            ),
        )
        amp = _complex(lv["amplitude"]) if "amplitude" in lv else None
        levels.append(Level(key, params, amp, _aux(lv.get("aux_init"))))

    g = doc["grid"]
    try:
        grid = TimeGrid(float(g.get("t0", 0.0)), float(g["t1"]), int(g["steps"]))
    except ValueError as exc:
        raise ConfigError("grid", str(exc)) from None

    init = doc.get("initial_state", {"kind": "aligned_m"})
    two_m = vector = None
    if init["kind"] == "aligned_m":
        two_m = init.get("two_m")
        if two_m is not None and (abs(two_m) > label.two_j or (label.two_j - two_m) % 2):
            raise ConfigError("initial_state.two_m", f"invalid projection for two_j={label.two_j}")
    else:
        vector = tuple(_complex(v) for v in init["vector"])
        if len(vector) != label.two_j + 1:
            raise ConfigError("initial_state.vector", f"expected {label.two_j + 1} components")
        if sum(abs(v) ** 2 for v in vector) == 0:
            raise ConfigError("initial_state.vector", "zero vector")

    return RunConfig(
        label=label,
        levels=tuple(levels),
        detector=det,
        grid=grid,
        initial_two_m=two_m,
        initial_vector=vector,
        aux_init=_aux(doc.get("aux_init", "aligned")),
        eps_sing=float(doc.get("eps_sing", DEFAULT_EPS_SING)),
        tasks=tuple(doc.get("tasks", ())),
        output_dir=doc.get("output_dir"),
        raw=copy.deepcopy(doc),
    )


def parse_config(text):
    """Parse and validate a JSON configuration document."""
    try:
        doc = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"malformed JSON: {exc}") from None
    return config_from_dict(doc)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def with_override(cfg, dotted, value):
    """Copy of ``cfg`` with the JSON entry at ``dotted`` (e.g. ``levels.0.E``) replaced."""
    doc = copy.deepcopy(cfg.raw)
    parts = dotted.split(".")
    node = doc
    try:
        for p in parts[:-1]:
            node = node[int(p)] if isinstance(node, list) else node[p]
        last = parts[-1]
        if isinstance(node, list):
            node[int(last)] = value
        else:
            if last not in node:
                raise KeyError(last)
            node[last] = value
    except (KeyError, IndexError, ValueError, TypeError):
        raise ConfigError(dotted, "no such entry in the configuration") from None
    return config_from_dict(doc)
