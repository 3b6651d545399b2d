"""Orchestration shared by the CLI commands and ``verify``."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .decoherence import (
    DecoherenceTrace,
    branch_overlap,
    decoherence_closed_trace,
    decoherence_direct,
    reduced_coherence,
    special_case_trace,
)
from .invariant import check_invariant_ode, check_transformed_invariant, transformed_hamiltonian_residual
from .model import hamiltonian_batch
from .oracle import direct_propagate, fidelity
from .phases import cumulative_trapezoid, evolve_branch, initial_state
from .su2 import build_rep


def run_branch(cfg, key):
    """Exact invariant solution for level ``key`` of ``cfg``."""
    level = cfg.level(key)
    aux = cfg.aux_for(level)
    lambda0, gamma0 = aux if aux is not None else (None, None)
    psi0 = None
    if cfg.initial_vector is not None:
        psi0 = initial_state(build_rep(cfg.label.two_j), None, vector=cfg.initial_vector)
    return evolve_branch(
        cfg.detector,
        level.params,
        cfg.label,
        cfg.grid,
        psi0,
        two_m=cfg.initial_two_m,
        k=key,
        lambda0=lambda0,
        gamma0=gamma0,
        eps_sing=cfg.eps_sing,
    )


def hamiltonian_source(cfg, key):
    rep = build_rep(cfg.label.two_j)
    params = cfg.level(key).params

    def source(times):
        return hamiltonian_batch(cfg.detector, params, cfg.label, times, rep)

    return source


@dataclass(frozen=True, eq=False)
class BranchReport:
    key: int
    branch: object
    oracle: np.ndarray
    fidelity: float
    norm_deviation: float
    invariant_ode_residual: float
    transformed_invariant_deviation: float
    transformed_residual: float
    transformed_offdiag: float

    @property
    def degenerate(self):
        return self.branch.trajectory.degenerate


def branch_report(cfg, key, branch=None):
    """Solve one branch and score it against the direct propagation."""
    branch = run_branch(cfg, key) if branch is None else branch
    src = hamiltonian_source(cfg, key)
    grid = cfg.grid
    ref = direct_propagate(src, branch.psi[0], grid)
    hams = src(grid.nodes)
    total, offdiag = transformed_hamiltonian_residual(branch.trajectory, branch.spherical, hams, branch.rep)
    return BranchReport(
        key=key,
        branch=branch,
        oracle=ref,
        fidelity=fidelity(branch.psi, ref),
        norm_deviation=float(np.max(np.abs(np.linalg.norm(branch.psi, axis=1) - 1))),
        invariant_ode_residual=check_invariant_ode(branch.trajectory, hams, grid),
        transformed_invariant_deviation=check_transformed_invariant(branch.trajectory, branch.rep),
        transformed_residual=total,
        transformed_offdiag=offdiag,
    )


def detector_two_m(cfg):
    return cfg.label.two_j if cfg.initial_two_m is None else cfg.initial_two_m


def special_case_alpha(cfg, bk, bl, tol=1e-12):
    """Separation angle ``int (c_k - c_l)/2 dt`` when both branches are pure-``J2`` drives.

    Returns ``None`` unless ``w1 = w2``, ``theta = phi = pi/2`` on every node and
    both auxiliary starts coincide with ``gamma0 = 0``.
    """
    for b in (bk, bl):
        sp = b.spherical
        if not (
            np.all(np.abs(sp.theta - np.pi / 2) < tol)
            and np.all(np.abs(sp.phi - np.pi / 2) < tol)
        ):
            return None
    tk, tl = bk.trajectory, bl.trajectory
    if abs(tk.lam[0] - tl.lam[0]) > tol or abs(tk.gamma[0]) > tol or abs(tl.gamma[0]) > tol:
        return None
    return cumulative_trapezoid((bk.spherical.c - bl.spherical.c) / 2, cfg.grid.h)


@dataclass(frozen=True, eq=False)
class DecoherenceBundle:
    direct: DecoherenceTrace
    closed: DecoherenceTrace
    special: Optional[DecoherenceTrace]
    overlap: np.ndarray
    coherence: np.ndarray
    alpha: Optional[np.ndarray]

    @property
    def closed_discrepancy(self):
        return float(np.max(np.abs(self.direct.values - self.closed.values)))

    @property
    def special_discrepancy(self):
        if self.special is None:
            return None
        return float(np.max(np.abs(self.direct.values - self.special.values)))


def decoherence_bundle(cfg, k, l, bk=None, bl=None):
    bk = run_branch(cfg, k) if bk is None else bk
    bl = run_branch(cfg, l) if bl is None else bl
    two_j = cfg.label.two_j
    two_m = detector_two_m(cfg)
    grid = cfg.grid
    direct = decoherence_direct(bk.V, bl.V, two_j, two_m, grid=grid, k=k, l=l)
    closed = decoherence_closed_trace(
        bk.displacement.beta, bl.displacement.beta, two_j, two_m, grid=grid, k=k, l=l
    )
    alpha = special_case_alpha(cfg, bk, bl)
    special = None if alpha is None else special_case_trace(alpha, two_j, two_m, grid=grid, k=k, l=l)
    idx = bk.rep.basis_index(two_m)
    overlap = branch_overlap(direct, bk.phases[idx], bl.phases[idx])
    amps = cfg.branch_amplitudes([k, l])
    coherence = reduced_coherence(amps, {(0, 1): overlap})
    return DecoherenceBundle(direct, closed, special, overlap, coherence, alpha)
