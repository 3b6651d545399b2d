"""Lewis-Riesenfeld invariant of the driven spin and its diagonalising unitary.

The invariant is ``I = 1/2 sin(lam) e^{-i gam} J+ + 1/2 sin(lam) e^{i gam} J- + cos(lam) J3``;
its angles obey

    lam' = c sin(theta) sin(phi - gam)
    gam' = c [cos(theta) - sin(theta) cot(lam) cos(phi - gam)]

and ``V = exp(beta J+ - beta* J-)`` with ``beta = -(lam/2) e^{-i gam}`` maps it to ``J3``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteError, SingularityError
from .su2 import build_rep, su2_displacement, su2_displacement_batch

DEFAULT_EPS_SING = 1e-9


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    t1: float
    steps: int

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValueError(f"steps must be an integer >= 2, got {self.steps!r}")
        if not (math.isfinite(self.t0) and math.isfinite(self.t1)) or self.t1 <= self.t0:
            raise ValueError(f"need finite t0 < t1, got [{self.t0}, {self.t1}]")

    @property
    def h(self):
        return (self.t1 - self.t0) / self.steps

    @property
    def nodes(self):
        return self.t0 + self.h * np.arange(self.steps + 1)

    def __len__(self):
        return self.steps + 1

    def refined(self, factor):
        return TimeGrid(self.t0, self.t1, self.steps * factor)


@dataclass(frozen=True, eq=False)
class AuxiliaryTrajectory:
    grid: TimeGrid
    lam: np.ndarray
    gamma: np.ndarray
    lam_dot: np.ndarray
    gamma_dot: np.ndarray
    degenerate: bool = False


@dataclass(frozen=True, eq=False)
class DisplacementParams:
    beta: np.ndarray


def _auxiliary_rhs(c, theta, phi, lam, gam):
    """Right-hand side ``(lam', gam')`` of the auxiliary equations."""
    st = np.sin(theta)
    d = phi - gam
    lam_dot = c * st * np.sin(d)
    gam_dot = c * (np.cos(theta) - st * (np.cos(lam) / np.sin(lam)) * np.cos(d))
    return lam_dot, gam_dot


def _degenerate_rhs(c, theta, phi, lam, gam):
    # coupling identically zero: lam is frozen at a pole and gam follows c cos(theta)
    return 0.0 * c, c * np.cos(theta)


def integrate_auxiliary(source, lambda0, gamma0, grid, eps_sing=DEFAULT_EPS_SING):
    """Integrate the auxiliary equations with classical RK4 on ``grid``.

    ``source`` maps an array of times to :class:`~cini_invariant.model.SphericalSamples`;
    it is evaluated at every node and half step so the stage values are exact.

    When ``|sin(lambda0)| < eps_sing`` the start is only admissible if the
    coupling vanishes on the whole grid; ``lam`` then stays at ``lambda0`` and
    ``gam`` integrates ``c cos(theta) = w1 - w2``.

    Raises
    ------
    SingularityError
        ``|sin(lam)|`` dropped below ``eps_sing`` (reports the first such time).
    NonFiniteError
        NaN or infinity in the state.
    """
    h = grid.h
    half_times = grid.t0 + 0.5 * h * np.arange(2 * grid.steps + 1)
    sp = source(half_times)
    c, theta, phi = sp.c, sp.theta, sp.phi

    degenerate = abs(math.sin(lambda0)) < eps_sing
    if degenerate:
        if not np.all(sp.degenerate):
            raise SingularityError(grid.t0, abs(math.sin(lambda0)))
        rhs = _degenerate_rhs
    else:
        rhs = _auxiliary_rhs

    n = grid.steps + 1
    lam = np.empty(n)
    gam = np.empty(n)
    lam[0], gam[0] = lambda0, gamma0

    def check(t, lv, gv):
        if not (math.isfinite(lv) and math.isfinite(gv)):
            raise NonFiniteError(t, "auxiliary angle")
        if not degenerate and abs(math.sin(lv)) < eps_sing:
            raise SingularityError(t, abs(math.sin(lv)))

    for i in range(grid.steps):
        a, b, e = 2 * i, 2 * i + 1, 2 * i + 2
        t = half_times[a]
        l0, g0 = lam[i], gam[i]
        k1l, k1g = rhs(c[a], theta[a], phi[a], l0, g0)
        l1, g1 = l0 + 0.5 * h * k1l, g0 + 0.5 * h * k1g
        check(half_times[b], l1, g1)
        k2l, k2g = rhs(c[b], theta[b], phi[b], l1, g1)
        l2, g2 = l0 + 0.5 * h * k2l, g0 + 0.5 * h * k2g
        check(half_times[b], l2, g2)
        k3l, k3g = rhs(c[b], theta[b], phi[b], l2, g2)
        l3, g3 = l0 + h * k3l, g0 + h * k3g
        check(half_times[e], l3, g3)
        k4l, k4g = rhs(c[e], theta[e], phi[e], l3, g3)
        lam[i + 1] = l0 + h / 6 * (k1l + 2 * k2l + 2 * k3l + k4l)
        gam[i + 1] = g0 + h / 6 * (k1g + 2 * k2g + 2 * k3g + k4g)
        check(t + h, lam[i + 1], gam[i + 1])

    lam_dot, gam_dot = rhs(c[::2], theta[::2], phi[::2], lam, gam)
    return AuxiliaryTrajectory(
        grid=grid,
        lam=lam,
        gamma=gam,
        lam_dot=np.broadcast_to(lam_dot, lam.shape).copy(),
        gamma_dot=np.broadcast_to(gam_dot, gam.shape).copy(),
        degenerate=degenerate,
    )


def beta_from_aux(traj):
    return DisplacementParams(beta=-(traj.lam / 2) * np.exp(-1j * traj.gamma))


def invariant_matrix(lam, gamma, rep):
    half = 0.5 * math.sin(lam)
    return (
        half * np.exp(-1j * gamma) * rep.J_plus
        + half * np.exp(1j * gamma) * rep.J_minus
        + math.cos(lam) * rep.J3
    )


def invariant_batch(lam, gamma, rep):
    lam = np.asarray(lam, dtype=float)[:, None, None]
    gamma = np.asarray(gamma, dtype=float)[:, None, None]
    half = 0.5 * np.sin(lam)
    return half * np.exp(-1j * gamma) * rep.J_plus + half * np.exp(1j * gamma) * rep.J_minus + np.cos(lam) * rep.J3


def build_V(beta, rep):
    return su2_displacement(rep, beta)


def build_V_batch(params, rep):
    return su2_displacement_batch(rep, params.beta)


def _rep_for(dim):
    return build_rep(dim - 1)


def check_transformed_invariant(traj, rep):
    """Max over nodes of ``max|V^dagger I V - J3|``."""
    V = build_V_batch(beta_from_aux(traj), rep)
    inv = invariant_batch(traj.lam, traj.gamma, rep)
    transformed = np.conj(np.swapaxes(V, 1, 2)) @ inv @ V
    return float(np.max(np.abs(transformed - rep.J3)))


def check_invariant_ode(traj, hamiltonians, grid):
    """Max central-difference residual of ``dI/dt + (1/i)[I, H] = 0`` at interior nodes."""
    hamiltonians = np.asarray(hamiltonians)
    if grid.steps < 2 or len(traj.lam) != grid.steps + 1 or len(hamiltonians) != grid.steps + 1:
        raise ValueError("grid too small or samples not aligned with the grid")
    rep = _rep_for(hamiltonians.shape[-1])
    inv = invariant_batch(traj.lam, traj.gamma, rep)
    dI = (inv[2:] - inv[:-2]) / (2 * grid.h)
    mid_i = inv[1:-1]
    mid_h = hamiltonians[1:-1]
    comm = mid_i @ mid_h - mid_h @ mid_i
    resid = dI - 1j * comm
    return float(np.max(np.abs(resid)))


def transformed_h_coefficients(traj, spherical):
    """Coefficient of ``J3`` in the transformed Hamiltonian at every node.

    ``c [cos(lam) cos(theta) + sin(lam) sin(theta) cos(gam - phi)] + gam' (1 - cos(lam))``.
    The overall ``c`` multiplies the bracket so the term has units of energy.
    """
    lam, gam = traj.lam, traj.gamma
    bracket = np.cos(lam) * np.cos(spherical.theta) + np.sin(lam) * np.sin(spherical.theta) * np.cos(gam - spherical.phi)
    return spherical.c * bracket + traj.gamma_dot * (1 - np.cos(lam))


def transformed_h_coefficient(traj, spherical, t_index):
    sp = spherical[t_index]
    lam = traj.lam[t_index]
    gam = traj.gamma[t_index]
    bracket = math.cos(lam) * math.cos(sp.theta) + math.sin(lam) * math.sin(sp.theta) * math.cos(gam - sp.phi)
    return sp.c * bracket + traj.gamma_dot[t_index] * (1 - math.cos(lam))


def time_derivative(samples, h):
    """Second-order finite-difference derivative along axis 0."""
    d = np.empty_like(samples)
    d[1:-1] = (samples[2:] - samples[:-2]) / (2 * h)
    d[0] = (-3 * samples[0] + 4 * samples[1] - samples[2]) / (2 * h)
    d[-1] = (3 * samples[-1] - 4 * samples[-2] + samples[-3]) / (2 * h)
    return d


def transformed_hamiltonian_residual(traj, spherical, hamiltonians, rep):
    """Return ``(total, offdiag)`` max deviations of ``V^dagger H V - i V^dagger V'``.

    ``total`` compares with ``coeff J3 + f``; ``offdiag`` is the largest entry
    off the diagonal.  Both shrink as O(h^2) for trajectories that solve the
    auxiliary equations.
    """
    V = build_V_batch(beta_from_aux(traj), rep)
    Vh = np.conj(np.swapaxes(V, 1, 2))
    Vdot = time_derivative(V, traj.grid.h)
    hv = Vh @ np.asarray(hamiltonians) @ V - 1j * (Vh @ Vdot)
    coeff = transformed_h_coefficients(traj, spherical)
    target = coeff[:, None, None] * rep.J3 + spherical.f[:, None, None] * np.eye(rep.dim)
    dev = hv - target
    off = dev.copy()
    idx = np.arange(rep.dim)
    off[:, idx, idx] = 0
    return float(np.max(np.abs(dev))), float(np.max(np.abs(off)))
