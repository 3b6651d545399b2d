"""Time-dependent coefficients and the fixed-N subspace Hamiltonian.

Within the sector of total boson number ``n1 + n2 = 2j`` and system level ``k``
the Hamiltonian is

    H = E_k + g_k J+ + g_k* J- + (w1 - w2) J3 + n (w1 + w2)

which is rewritten with spherical coordinates as

    H = c (1/2 sin(theta) e^{-i phi} J+ + 1/2 sin(theta) e^{i phi} J- + cos(theta) J3) + f.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np


class Schedule:
    """A real function of time.  Subclasses are immutable value objects."""

    def __call__(self, t):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError

    def __add__(self, other):
        return Sum((self, other))


@dataclass(frozen=True)
class Constant(Schedule):
    a: float

    def __call__(self, t):
        return self.a + 0.0 * t

    def to_json(self):
        return {"type": "constant", "a": self.a}


@dataclass(frozen=True)
class Linear(Schedule):
    """``a + b t``."""

    a: float
    b: float

    def __call__(self, t):
        return self.a + self.b * t

    def to_json(self):
        return {"type": "linear", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Cosine(Schedule):
    """``A cos(Omega t + delta)``."""

    A: float
    Omega: float
    delta: float = 0.0

    def __call__(self, t):
        return self.A * np.cos(self.Omega * t + self.delta)

    def to_json(self):
        return {"type": "cosine", "A": self.A, "Omega": self.Omega, "delta": self.delta}


@dataclass(frozen=True)
class Sum(Schedule):
    parts: Tuple[Schedule, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def __call__(self, t):
        total = 0.0 * t
        for p in self.parts:
            total = total + p(t)
        return total

    def to_json(self):
        return {"type": "sum", "parts": [p.to_json() for p in self.parts]}


def eval_schedule(s, t):
    return s(t)


def schedule_from_json(obj, path="schedule"):
    """Decode the canonical JSON form; a bare number means ``Constant``."""
    from .errors import ConfigError

    if isinstance(obj, bool):
        raise ConfigError(path, "expected a schedule, got a boolean")
    if isinstance(obj, (int, float)):
        return Constant(float(obj))
    if not isinstance(obj, dict) or "type" not in obj:
        raise ConfigError(path, "expected a number or an object with a 'type' key")
    kind = obj["type"]
    fields = {
        "constant": ("a",),
        "linear": ("a", "b"),
        "cosine": ("A", "Omega", "delta"),
        "sum": ("parts",),
    }
    if kind not in fields:
        raise ConfigError(f"{path}.type", f"unknown schedule type {kind!r}")
    extra = set(obj) - set(fields[kind]) - {"type"}
    if extra:
        raise ConfigError(f"{path}.{sorted(extra)[0]}", "unknown key")
    try:
        if kind == "constant":
            return Constant(float(obj["a"]))
        if kind == "linear":
            return Linear(float(obj["a"]), float(obj["b"]))
        if kind == "cosine":
            return Cosine(float(obj["A"]), float(obj["Omega"]), float(obj.get("delta", 0.0)))
    except KeyError as exc:
        raise ConfigError(f"{path}.{exc.args[0]}", "missing required key") from None
    except (TypeError, ValueError):
        raise ConfigError(path, "schedule parameters must be numbers") from None
    parts = obj.get("parts")
    if not isinstance(parts, list) or not parts:
        raise ConfigError(f"{path}.parts", "expected a nonempty list")
    return Sum(tuple(schedule_from_json(p, f"{path}.parts.{i}") for i, p in enumerate(parts)))


@dataclass(frozen=True)
class ComplexSchedule:
    """``g(t) = r(t) exp(i chi(t))``."""

    amplitude: Schedule
    phase: Schedule = Constant(0.0)

    def __call__(self, t):
        return self.amplitude(t) * np.exp(1j * self.phase(t))

    def to_json(self):
        return {"amplitude": self.amplitude.to_json(), "phase": self.phase.to_json()}


@dataclass(frozen=True)
class LevelParams:
    """Energy ``E_k`` and coupling ``g_k`` of one system level."""

    E: Schedule
    g: ComplexSchedule


@dataclass(frozen=True)
class DetectorParams:
    omega1: Schedule
    omega2: Schedule


@dataclass(frozen=True)
class SubspaceLabel:
    """Boson occupations ``(n1, n2)`` of the detector modes."""

    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0 or int(self.n1) != self.n1 or int(self.n2) != self.n2:
            raise ValueError(f"occupations must be nonnegative integers, got ({self.n1}, {self.n2})")

    @property
    def two_j(self):
        return self.n1 + self.n2

    @property
    def two_m(self):
        return self.n1 - self.n2

    @property
    def n(self):
        return (self.n1 + self.n2) / 2


@dataclass(frozen=True)
class SphericalParams:
    c: float
    theta: float
    phi: float
    f: float
    degenerate: bool = False

    @property
    def g(self):
        """Coupling rebuilt from the spherical form."""
        return 0.5 * self.c * math.sin(self.theta) * np.exp(-1j * self.phi)

    @property
    def detuning(self):
        """``w1 - w2`` rebuilt from the spherical form."""
        return self.c * math.cos(self.theta)


def spherical_from_physical(det, lvl, n, t):
    """Spherical parameters ``(c, theta, phi, f)`` at time ``t``.

    ``phi`` is set to 0 when ``g = 0`` and ``theta`` to 0 when ``c = 0``; both
    cases are flagged ``degenerate``.
    """
    w1 = float(det.omega1(t))
    w2 = float(det.omega2(t))
    g = complex(lvl.g(t))
    delta = w1 - w2
    ag = abs(g)
    c = math.hypot(delta, 2 * ag)
    f = float(lvl.E(t)) + n * (w1 + w2)
    if ag == 0.0:
        theta = 0.0 if c == 0.0 else math.atan2(0.0, delta)
        return SphericalParams(c, theta, 0.0, f, degenerate=True)
    theta = math.atan2(2 * ag, delta)
    phi = -math.atan2(g.imag, g.real)
    if phi <= -math.pi:
        phi += 2 * math.pi
    return SphericalParams(c, theta, phi, f)


def hamiltonian_matrix(det, lvl, label, t, rep):
    """Subspace Hamiltonian built term by term from the physical coefficients."""
    if rep.two_j != label.two_j:
        raise ValueError(f"representation two_j={rep.two_j} does not match label two_j={label.two_j}")
    w1 = float(det.omega1(t))
    w2 = float(det.omega2(t))
    g = complex(lvl.g(t))
    shift = float(lvl.E(t)) + label.n * (w1 + w2)
    return (
        g * rep.J_plus
        + np.conj(g) * rep.J_minus
        + (w1 - w2) * rep.J3
        + shift * np.eye(rep.dim)
    )


def hamiltonian_from_spherical(sp, rep):
    """Same operator assembled from ``(c, theta, phi, f)``."""
    half = 0.5 * math.sin(sp.theta)
    return sp.c * (
        half * np.exp(-1j * sp.phi) * rep.J_plus
        + half * np.exp(1j * sp.phi) * rep.J_minus
        + math.cos(sp.theta) * rep.J3
    ) + sp.f * np.eye(rep.dim)


@dataclass(frozen=True, eq=False)
class SphericalSamples:
    """Spherical parameters sampled at an array of times."""

    t: np.ndarray
    c: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    f: np.ndarray
    degenerate: np.ndarray

    def __len__(self):
        return len(self.t)

    def __getitem__(self, i):
        return SphericalParams(
            float(self.c[i]), float(self.theta[i]), float(self.phi[i]), float(self.f[i]), bool(self.degenerate[i])
        )

    def take(self, idx):
        return SphericalSamples(*(np.asarray(a)[idx] for a in (self.t, self.c, self.theta, self.phi, self.f, self.degenerate)))


def spherical_samples(det, lvl, n, times):
    """Vectorised :func:`spherical_from_physical` over ``times``."""
    t = np.asarray(times, dtype=float)
    ones = np.ones_like(t)
    w1 = det.omega1(t) * ones
    w2 = det.omega2(t) * ones
    g = lvl.g(t) * ones
    delta = w1 - w2
    ag = np.abs(g)
    c = np.hypot(delta, 2 * ag)
    f = lvl.E(t) * ones + n * (w1 + w2)
    degenerate = ag == 0.0
    theta = np.where(c == 0.0, 0.0, np.arctan2(2 * ag, delta))
    phi = np.where(degenerate, 0.0, -np.arctan2(g.imag, g.real))
    phi = np.where(phi <= -np.pi, phi + 2 * np.pi, phi)
    return SphericalSamples(t, c, theta, phi, f, degenerate)


def spherical_source(det, lvl, n):
    """Callable ``times -> SphericalSamples`` for one branch."""

    def source(times):
        return spherical_samples(det, lvl, n, times)

    return source


def hamiltonian_batch(det, lvl, label, times, rep):
    """:func:`hamiltonian_matrix` at every time in ``times``; shape ``(n, dim, dim)``."""
    if rep.two_j != label.two_j:
        raise ValueError(f"representation two_j={rep.two_j} does not match label two_j={label.two_j}")
    t = np.asarray(times, dtype=float)
    ones = np.ones_like(t)
    w1 = det.omega1(t) * ones
    w2 = det.omega2(t) * ones
    g = lvl.g(t) * ones
    shift = lvl.E(t) * ones + label.n * (w1 + w2)
    return (
        g[:, None, None] * rep.J_plus
        + np.conj(g)[:, None, None] * rep.J_minus
        + (w1 - w2)[:, None, None] * rep.J3
        + shift[:, None, None] * np.eye(rep.dim)
    )
