"""Acceptance checks run by ``cini verify`` and by the test-suite.

Every check returns a :class:`CheckResult`; thresholds are fixed here.
"""

import functools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .config import with_override
from .decoherence import (
    classical_limit_scan,
    closed_form_discrepancy,
    decoherence_closed,
    decoherence_direct,
    special_case_factor,
)
from .errors import NonFiniteError, SingularityError
from .invariant import check_invariant_ode, invariant_batch
from .model import hamiltonian_batch
from .phases import cumulative_trapezoid, cyclic_solid_angle
from .presets import preset
from .runner import branch_report, run_branch
from .su2 import build_rep, commutator, su2_displacement_batch

SEED = 20240611


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0
    table: list = field(default_factory=list)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        parts = " ".join(f"{k}={_short(v)}" for k, v in self.details.items())
        return f"{status} {self.name} ({self.seconds:.2f}s) {parts}".rstrip()

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "seconds": self.seconds, "details": self.details}


def _short(v):
    if isinstance(v, float):
        return f"{v:.3e}"
    return str(v)


def _check_name(fn):
    return fn.__name__[len("check_"):]


def _timed(fn):
    """Record wall time; a numerical breakdown inside a check counts as a failure."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        try:
            result = fn(*args, **kwargs)
        except (SingularityError, NonFiniteError) as exc:
            result = CheckResult(_check_name(fn), False, {"error": str(exc)})
        result.seconds = time.perf_counter() - start
        return result

    return wrapper


@_timed
def check_algebra(max_two_j=20, samples=10, tol=1e-12):
    """Commutation relations and unitarity of displacements for ``two_j = 1..20``."""
    rng = np.random.default_rng(SEED)
    comm_err = unit_err = det_err = 0.0
    for two_j in range(1, max_two_j + 1):
        rep = build_rep(two_j)
        comm_err = max(
            comm_err,
            np.max(np.abs(commutator(rep.J3, rep.J_plus) - rep.J_plus)),
            np.max(np.abs(commutator(rep.J3, rep.J_minus) + rep.J_minus)),
            np.max(np.abs(commutator(rep.J_plus, rep.J_minus) - 2 * rep.J3)),
        )
        zetas = rng.normal(size=samples) + 1j * rng.normal(size=samples)
        U = su2_displacement_batch(rep, zetas)
        eye = np.eye(rep.dim)
        unit_err = max(unit_err, np.max(np.abs(np.conj(np.swapaxes(U, 1, 2)) @ U - eye)))
        det_err = max(det_err, np.max(np.abs(np.abs(np.linalg.det(U)) - 1)))
    passed = comm_err <= tol and unit_err <= tol and det_err <= tol
    return CheckResult(
        "algebra", passed, {"commutator_err": float(comm_err), "unitarity_err": float(unit_err), "det_err": float(det_err)}
    )


@_timed
def check_transformed_invariant(samples=1000, max_two_j=8, tol=1e-10):
    """``V^dagger I V = J3`` for random angles."""
    rng = np.random.default_rng(SEED + 1)
    lam = rng.uniform(0, math.pi, samples)
    gam = rng.uniform(-math.pi, math.pi, samples)
    worst = 0.0
    for two_j in range(1, max_two_j + 1):
        sel = np.arange(two_j - 1, samples, max_two_j)
        rep = build_rep(two_j)
        beta = -(lam[sel] / 2) * np.exp(-1j * gam[sel])
        V = su2_displacement_batch(rep, beta)
        inv = invariant_batch(lam[sel], gam[sel], rep)
        dev = np.conj(np.swapaxes(V, 1, 2)) @ inv @ V - rep.J3
        worst = max(worst, float(np.max(np.abs(dev))))
    return CheckResult("transformed_invariant", worst <= tol, {"max_dev": worst, "samples": samples})


def _residual(cfg):
    br = run_branch(cfg, cfg.level_keys[0])
    hams = hamiltonian_batch(cfg.detector, cfg.level(cfg.level_keys[0]).params, cfg.label, cfg.grid.nodes, br.rep)
    return check_invariant_ode(br.trajectory, hams, cfg.grid)


@_timed
def check_invariant_ode_residual(tol=1e-5, ratio_window=(3.5, 4.5)):
    """Central-difference residual of the invariant equation and its O(h^2) decay."""
    details = {}
    passed = True
    for name in ("special_case", "sinusoidal"):
        cfg = preset(name)
        coarse = _residual(cfg)
        fine = _residual(with_override(cfg, "grid.steps", cfg.grid.steps * 2))
        ratio = coarse / fine
        ok = coarse <= tol and ratio_window[0] <= ratio <= ratio_window[1]
        passed &= ok
        details[f"{name}_residual"] = coarse
        details[f"{name}_ratio"] = float(ratio)
    return CheckResult("invariant_ode_residual", bool(passed), details)


@_timed
def check_pure_j2_trajectory(tol=1e-8):
    """Pure-``J2`` drive: ``lambda = 0.1 + t`` and ``gamma = 0``."""
    cfg = preset("special_case")
    br = run_branch(cfg, 0)
    t = cfg.grid.nodes
    lam_err = float(np.max(np.abs(br.trajectory.lam - (0.1 + t))))
    gam_err = float(np.max(np.abs(br.trajectory.gamma)))
    return CheckResult("pure_j2_trajectory", lam_err <= tol and gam_err <= tol, {"lambda_err": lam_err, "gamma_err": gam_err})


@_timed
def check_oracle_fidelity(tol=1e-6, configs=("fixed_point", "sinusoidal", "special_case")):
    """Invariant solution versus exponential-midpoint propagation."""
    details = {}
    worst = 1.0
    for name in configs:
        cfg = preset(name)
        rep = branch_report(cfg, cfg.level_keys[0])
        details[f"{name}_infidelity"] = 1 - rep.fidelity
        worst = min(worst, rep.fidelity)
    return CheckResult("oracle_fidelity", worst >= 1 - tol, details)


def special_pair_direct(two_j, stride=16):
    """Direct decoherence factor along the pure-``J2`` pair and the separation angle."""
    cfg = with_override(preset("special_pair"), "label", {"n1": two_j, "n2": 0})
    bk = run_branch(cfg, 0)
    bl = run_branch(cfg, 1)
    idx = np.arange(0, cfg.grid.steps, stride)
    F = decoherence_direct(bk.V[idx], bl.V[idx], two_j, two_j).values
    alpha = cumulative_trapezoid((bk.spherical.c - bl.spherical.c) / 2, cfg.grid.h)[idx]
    return alpha, F


@_timed
def check_special_case_law(tol=1e-8, two_js=(1, 2, 4, 10)):
    """Direct matrix element against ``cos^{2j}(alpha)`` at 64 angles in [0, 2 pi)."""
    details = {}
    worst = 0.0
    for two_j in two_js:
        alpha, F = special_pair_direct(two_j)
        law = np.cos(alpha) ** two_j
        err = float(np.max(np.abs(F - law)))
        details[f"err_2j={two_j}"] = err
        worst = max(worst, err)
    details["n_alpha"] = len(alpha)
    spot = special_case_factor(1, math.pi / 3)
    spot0 = special_case_factor(7, 0.0)
    passed = worst <= tol and len(alpha) == 64 and abs(spot - 0.5) <= 1e-15 and spot0 == 1.0
    details["spot_pi3"] = spot
    return CheckResult("special_case_law", passed, details)


@_timed
def check_classical_limit(alpha=math.pi / 4, two_js=(2, 10, 20, 50, 100)):
    """Collapse of ``|F|`` with growing spin."""
    scan = classical_limit_scan(alpha, two_js)
    direct = scan.direct
    big = float(direct[-1])
    target = math.cos(alpha) ** two_js[-1]
    ratio = big / target
    decreasing = bool(np.all(np.diff(direct) < 0))
    passed = big <= 1e-14 and 0.5 <= ratio <= 2.0 and decreasing and scan.monotone
    return CheckResult(
        "classical_limit",
        passed,
        {"absF_j50": big, "law_j50": target, "ratio": float(ratio), "strictly_decreasing": decreasing},
    )


@_timed
def check_geometric_phase(tol=1e-6, linear_tol=1e-12):
    """One precession period at ``lambda = pi/3``: ``phi_g = -m * 2 pi (1 - cos(pi/3))``."""
    cfg = preset("precession")
    br = run_branch(cfg, 0)
    by_m = {p.two_m: p.geometric for p in br.phases}
    half = float(by_m[1][-1])
    expected = -0.5 * cyclic_solid_angle(math.pi / 3)
    per_m = np.array([by_m[tm] / (tm / 2) for tm in by_m if tm != 0])
    spread = float(np.max(np.abs(per_m - per_m[0])))
    err = abs(half - expected)
    return CheckResult(
        "geometric_phase",
        err <= tol and spread <= linear_tol,
        {"phi_g_half": half, "expected": expected, "err": err, "linearity_spread": spread},
    )


@_timed
def check_closed_form_accuracy(collinear_tol=1e-10, samples=200, scales=(0.4, 0.2, 0.1, 0.05, 0.025, 0.0125)):
    """Closed form versus direct sandwich; exact when collinear, cubic-bounded otherwise."""
    rng = np.random.default_rng(SEED + 2)
    collinear = 0.0
    for two_j in range(1, 9):
        rep = build_rep(two_j)
        chi = rng.uniform(-math.pi, math.pi, samples // 4)
        bk = rng.uniform(-math.pi, math.pi, samples // 4) * np.exp(1j * chi)
        bl = rng.uniform(-math.pi, math.pi, samples // 4) * np.exp(1j * chi)
        V = su2_displacement_batch(rep, np.r_[bk, bl])
        n = len(bk)
        for two_m in range(two_j, -two_j - 1, -2):
            d = decoherence_direct(V[:n], V[n:], two_j, two_m).values
            c = decoherence_closed(bk, bl, two_j, two_m)
            collinear = max(collinear, float(np.max(np.abs(d - c))))

    # the whole pure-J2 regime along a trajectory
    cfg = preset("special_pair")
    bk_, bl_ = run_branch(cfg, 0), run_branch(cfg, 1)
    along = 0.0
    for two_m in (1, -1):
        d = decoherence_direct(bk_.V, bl_.V, 1, two_m).values
        c = decoherence_closed(bk_.displacement.beta, bl_.displacement.beta, 1, two_m)
        along = max(along, float(np.max(np.abs(d - c))))

    table = []
    bound_ok = True
    for scale in scales:
        worst = 0.0
        worst_ratio = 0.0
        for _ in range(samples // 4):
            two_j = int(rng.integers(1, 5))
            two_m = two_j - 2 * int(rng.integers(0, two_j + 1))
            r = scale * np.sqrt(rng.uniform(0, 1, 2))
            ph = rng.uniform(-math.pi, math.pi, 2)
            beta_k, beta_l = r * np.exp(1j * ph)
            disc = closed_form_discrepancy(two_j, two_m, beta_k, beta_l)
            bmax = max(abs(beta_k), abs(beta_l))
            worst = max(worst, disc)
            worst_ratio = max(worst_ratio, disc / bmax**3)
            if scale <= 0.05 and disc > 5 * bmax**3:
                bound_ok = False
        table.append({"max_abs_beta": scale, "max_discrepancy": worst, "max_discrepancy_over_beta3": worst_ratio})
    passed = collinear <= collinear_tol and along <= collinear_tol and bound_ok
    res = CheckResult(
        "closed_form_accuracy",
        passed,
        {"collinear_err": collinear, "pure_J2_err": along, "cubic_bound_holds": bound_ok},
    )
    res.table = table
    return res


ALL_CHECKS = (
    check_algebra,
    check_transformed_invariant,
    check_invariant_ode_residual,
    check_pure_j2_trajectory,
    check_oracle_fidelity,
    check_special_case_law,
    check_classical_limit,
    check_geometric_phase,
    check_closed_form_accuracy,
)


def config_checks(cfg, name="config", tol=1e-6):
    """Oracle fidelity for every level of a user configuration."""
    results = []
    for key in cfg.level_keys:
        start = time.perf_counter()
        label = f"{name}:level{key}:oracle_fidelity"
        try:
            rep = branch_report(cfg, key)
        except (SingularityError, NonFiniteError) as exc:
            res = CheckResult(label, False, {"error": str(exc)})
        else:
            res = CheckResult(
                label,
                rep.fidelity >= 1 - tol,
                {
                    "infidelity": 1 - rep.fidelity,
                    "invariant_ode_residual": rep.invariant_ode_residual,
                    "transformed_invariant_dev": rep.transformed_invariant_deviation,
                },
            )
        res.seconds = time.perf_counter() - start
        results.append(res)
    return results


def run_all(checks=ALL_CHECKS):
    return [check() for check in checks]
