"""Dynamical and geometric phases, and assembly of the exact branch solution."""

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .invariant import (
    DEFAULT_EPS_SING,
    AuxiliaryTrajectory,
    DisplacementParams,
    TimeGrid,
    beta_from_aux,
    build_V_batch,
    integrate_auxiliary,
)
from .model import SphericalSamples, SubspaceLabel, spherical_source
from .su2 import build_rep


def cumulative_trapezoid(y, h):
    """Running trapezoid integral of node samples, starting at 0."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * h * (y[1:] + y[:-1]))
    return out


@dataclass(frozen=True, eq=False)
class PhaseTrace:
    grid: TimeGrid
    dynamical: np.ndarray
    geometric: np.ndarray
    two_m: int

    @property
    def total(self):
        return self.dynamical + self.geometric


def _check_aligned(traj, spherical):
    if len(spherical) != len(traj.lam):
        raise ValueError(f"spherical samples ({len(spherical)}) and trajectory ({len(traj.lam)}) are not aligned")


def dynamical_phase(two_m, traj, spherical):
    """``-int_0^t { m c [cos(lam) cos(theta) + sin(lam) sin(theta) cos(gam - phi)] + f } dt'``."""
    _check_aligned(traj, spherical)
    lam, gam = traj.lam, traj.gamma
    bracket = np.cos(lam) * np.cos(spherical.theta) + np.sin(lam) * np.sin(spherical.theta) * np.cos(gam - spherical.phi)
    integrand = 0.5 * two_m * spherical.c * bracket + spherical.f
    return -cumulative_trapezoid(integrand, traj.grid.h)


def geometric_phase(two_m, traj):
    """``-m int_0^t gam' (1 - cos(lam)) dt'``."""
    return -0.5 * two_m * cumulative_trapezoid(traj.gamma_dot * (1 - np.cos(traj.lam)), traj.grid.h)


def cyclic_solid_angle(lam):
    """Solid angle ``2 pi (1 - cos(lam))`` enclosed by a cone of half-angle ``lam``."""
    if not 0.0 <= lam <= math.pi:
        raise ValueError(f"polar angle must lie in [0, pi], got {lam}")
    return 2 * math.pi * (1 - math.cos(lam))


def phase_traces(traj, spherical, two_j):
    """One :class:`PhaseTrace` per basis state, in basis order."""
    return [
        PhaseTrace(traj.grid, dynamical_phase(two_m, traj, spherical), geometric_phase(two_m, traj), two_m)
        for two_m in range(two_j, -two_j - 1, -2)
    ]


def coefficients_from_initial(psi0, V0, rep, tol=1e-10):
    """Expansion coefficients ``C_m = <j,m| V^dagger(t0) |psi0>``."""
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (rep.dim,):
        raise ValueError(f"initial state has shape {psi0.shape}, expected ({rep.dim},)")
    norm = np.linalg.norm(psi0)
    if abs(norm - 1) > tol:
        raise ValueError(f"initial state is not normalised (norm = {norm:.12g})")
    return np.conj(np.asarray(V0)).T @ psi0


def assemble_solution(C, phases, V, rep):
    """``psi(t_i) = sum_m C_m exp(i phi_m(t_i)) V(t_i) |j,m>``; shape ``(nodes, dim)``."""
    C = np.asarray(C, dtype=complex)
    V = np.asarray(V)
    if len(phases) != rep.dim or C.shape != (rep.dim,):
        raise ValueError("need one coefficient and one phase trace per basis state")
    total = np.stack([p.total for p in phases], axis=1)
    if total.shape[0] != V.shape[0]:
        raise ValueError("phase traces and V samples are not aligned")
    amps = C[None, :] * np.exp(1j * total)
    return np.einsum("nij,nj->ni", V, amps)


@dataclass(frozen=True, eq=False)
class BranchEvolution:
    label: SubspaceLabel
    k: int
    spherical: SphericalSamples
    trajectory: AuxiliaryTrajectory
    displacement: DisplacementParams
    V: np.ndarray
    phases: List[PhaseTrace]
    C: np.ndarray
    psi: np.ndarray

    @property
    def grid(self):
        return self.trajectory.grid

    @property
    def rep(self):
        return build_rep(self.label.two_j)


def aligned_start(source, t0):
    """``(lambda0, gamma0) = (theta(t0), phi(t0))``."""
    sp = source(np.array([t0]))[0]
    return sp.theta, sp.phi


def evolve_branch(
    detector,
    level,
    label,
    grid,
    psi0=None,
    *,
    two_m=None,
    k=0,
    lambda0=None,
    gamma0=None,
    eps_sing=DEFAULT_EPS_SING,
):
    """Exact solution of one ``(n, k)`` branch via the invariant.

    ``psi0`` defaults to ``V(t0)|j,m>`` with ``m = two_m/2`` (``m = j`` if
    unset).  ``lambda0``/``gamma0`` default to the aligned start.
    """
    rep = build_rep(label.two_j)
    source = spherical_source(detector, level, label.n)
    if lambda0 is None or gamma0 is None:
        l0, g0 = aligned_start(source, grid.t0)
        lambda0 = l0 if lambda0 is None else lambda0
        gamma0 = g0 if gamma0 is None else gamma0
    traj = integrate_auxiliary(source, lambda0, gamma0, grid, eps_sing)
    spherical = source(grid.nodes)
    disp = beta_from_aux(traj)
    V = build_V_batch(disp, rep)
    traces = phase_traces(traj, spherical, rep.two_j)
    if psi0 is None:
        psi0 = initial_state(rep, V[0], two_m)
    C = coefficients_from_initial(psi0, V[0], rep)
    psi = assemble_solution(C, traces, V, rep)
    return BranchEvolution(label, k, spherical, traj, disp, V, traces, C, psi)


def initial_state(rep, V0, two_m: Optional[int] = None, vector=None):
    """Either ``V(t0)|j,m>`` or an explicit normalised vector."""
    if vector is not None:
        v = np.asarray(vector, dtype=complex)
        return v / np.linalg.norm(v)
    if two_m is None:
        two_m = rep.two_j
    return np.asarray(V0)[:, rep.basis_index(two_m)].copy()
