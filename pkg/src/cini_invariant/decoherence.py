"""Decoherence factor between detector branches.

``F_kl(t) = <j,m| V_k^dagger(t) V_l(t) |j,m>`` is computed directly from the
unitaries, from the factorised closed form in terms of ``beta_k, beta_l``, and
from the ``cos^{2j}`` law of the pure-``J2`` drive.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .invariant import TimeGrid
from .su2 import build_rep, su2_displacement, su2_displacement_batch, wigner_d_diag

METHODS = ("direct", "closed_form", "special_case")
# largest matrix dimension used for direct checks in scans
MAX_DIRECT_DIM = 201


@dataclass(frozen=True, eq=False)
class DecoherenceTrace:
    grid: Optional[TimeGrid]
    values: np.ndarray
    two_j: int
    two_m: int
    branch_k: int
    branch_l: int
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")


def decoherence_direct(Vk, Vl, two_j, two_m, *, grid=None, k=0, l=1):
    """Explicit sandwich ``<j,m| Vk^dagger Vl |j,m>`` at every sample."""
    Vk = np.asarray(Vk)
    Vl = np.asarray(Vl)
    if Vk.ndim == 2:
        Vk, Vl = Vk[None], Vl[None]
    dim = two_j + 1
    if Vk.shape != Vl.shape or Vk.shape[1:] != (dim, dim):
        raise ValueError(f"V samples have shapes {Vk.shape} and {Vl.shape}; expected (n, {dim}, {dim})")
    idx = build_rep(two_j).basis_index(two_m)
    e = np.zeros(dim)
    e[idx] = 1.0
    values = np.einsum("i,nji,njk,k->n", e, Vk.conj(), Vl, e)
    return DecoherenceTrace(grid, values, two_j, two_m, k, l, "direct")


def closed_form_prefactor(beta_k, beta_l, two_m):
    """``exp[-m (beta_l beta_k* - beta_k beta_l*)]``; a pure phase."""
    beta_k = np.asarray(beta_k, dtype=complex)
    beta_l = np.asarray(beta_l, dtype=complex)
    return np.exp(-0.5 * two_m * (beta_l * np.conj(beta_k) - beta_k * np.conj(beta_l)))


def decoherence_closed(beta_k, beta_l, two_j, two_m):
    """Factorised form ``prefactor * d^j_mm(2 |beta_l - beta_k|)``.

    Exact when ``beta_k`` and ``beta_l`` share a phase; otherwise only an
    approximation whose error is measured by :func:`closed_form_discrepancy`.
    """
    pre = closed_form_prefactor(beta_k, beta_l, two_m)
    dist = np.abs(np.asarray(beta_l, dtype=complex) - np.asarray(beta_k, dtype=complex))
    d = np.vectorize(lambda x: wigner_d_diag(two_j, two_m, 2 * x), otypes=[float])(dist)
    out = pre * d
    return complex(out) if np.ndim(out) == 0 else out


def decoherence_closed_trace(beta_k, beta_l, two_j, two_m, *, grid=None, k=0, l=1):
    values = np.atleast_1d(decoherence_closed(np.asarray(beta_k), np.asarray(beta_l), two_j, two_m))
    return DecoherenceTrace(grid, values.astype(complex), two_j, two_m, k, l, "closed_form")


def special_case_factor(two_j, alpha):
    """``cos(alpha)^{2j}``."""
    return math.cos(alpha) ** two_j


def special_case_trace(alpha, two_j, two_m, *, grid=None, k=0, l=1):
    """Pure-``J2`` law for every ``alpha`` sample; uses ``d^j_mm(2 alpha)`` so any ``m`` works."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    if two_m == two_j:
        values = np.cos(alpha) ** two_j
    else:
        values = np.array([wigner_d_diag(two_j, two_m, 2 * a) for a in alpha])
    return DecoherenceTrace(grid, values.astype(complex), two_j, two_m, k, l, "special_case")


def direct_special_case(two_j, alpha, two_m=None):
    """Direct matrix element for a pure-``J2`` pair separated by ``alpha``.

    Branch ``k`` is displaced by ``beta = -alpha`` and branch ``l`` not at all,
    which is the ``lambda_k - lambda_l = 2 alpha`` configuration.
    """
    rep = build_rep(two_j)
    two_m = two_j if two_m is None else two_m
    Vk = su2_displacement(rep, -alpha)
    Vl = su2_displacement(rep, 0.0)
    return complex(decoherence_direct(Vk, Vl, two_j, two_m).values[0])


@dataclass(frozen=True)
class ScanResult:
    alpha: float
    two_j: tuple
    law: np.ndarray
    direct: np.ndarray
    monotone: bool


def classical_limit_scan(alpha, two_js, *, direct=True):
    """``|F|`` against spin size for a fixed separation ``alpha``.

    The law is evaluated as ``exp(2j log|cos(alpha)|)`` so huge spins do not
    underflow prematurely.  Direct values are NaN above ``MAX_DIRECT_DIM``.
    """
    two_js = tuple(int(t) for t in two_js)
    ca = abs(math.cos(alpha))
    if ca == 0.0:
        law = np.array([0.0 if t > 0 else 1.0 for t in two_js])
    else:
        law = np.exp(np.array(two_js, dtype=float) * math.log(ca))
    dvals = np.full(len(two_js), np.nan)
    if direct:
        for i, t in enumerate(two_js):
            if t + 1 <= MAX_DIRECT_DIM:
                dvals[i] = abs(direct_special_case(t, alpha))
    monotone = bool(np.all(np.diff(law) < 0)) if len(law) > 1 else False
    return ScanResult(alpha, two_js, law, dvals, monotone)


def branch_overlap(F, phase_k, phase_l):
    """``exp(i [phi^l_m - phi^k_m]) F``: overlap ``<psi_k|psi_l>`` of the two branch states."""
    if phase_k.two_m != phase_l.two_m or phase_k.two_m != F.two_m:
        raise ValueError("phase traces and decoherence trace refer to different m")
    if not (len(phase_k.total) == len(phase_l.total) == len(F.values)):
        raise ValueError("phase traces and decoherence trace are not aligned")
    return np.exp(1j * (phase_l.total - phase_k.total)) * F.values


def reduced_coherence(amplitudes, overlaps, tol=1e-10):
    """Reduced system density matrix ``rho_kl(t)`` from branch amplitudes.

    ``overlaps`` maps ``(k, l)`` with ``k < l`` to the sequence
    ``<psi_k|psi_l>(t)`` returned by :func:`branch_overlap`.  The composite
    state ``sum_k c_k |psi_k>|k>`` gives ``rho_kl = c_k c_l* <psi_l|psi_k>``.
    Shape ``(nodes, K, K)``.
    """
    c = np.asarray(amplitudes, dtype=complex)
    norm = float(np.sum(np.abs(c) ** 2))
    if abs(norm - 1) > tol:
        raise ValueError(f"branch amplitudes are not normalised (sum |c|^2 = {norm:.12g})")
    K = len(c)
    lengths = {len(np.atleast_1d(v)) for v in overlaps.values()}
    if len(lengths) > 1:
        raise ValueError("overlap sequences differ in length")
    n = lengths.pop() if lengths else 1
    rho = np.empty((n, K, K), dtype=complex)
    for k in range(K):
        rho[:, k, k] = abs(c[k]) ** 2
        for l in range(k + 1, K):
            if (k, l) not in overlaps:
                raise ValueError(f"missing overlap for branch pair ({k}, {l})")
            ov = np.atleast_1d(np.asarray(overlaps[(k, l)], dtype=complex))
            rho[:, k, l] = c[k] * np.conj(c[l]) * np.conj(ov)
            rho[:, l, k] = np.conj(rho[:, k, l])
    return rho


def closed_form_discrepancy(two_j, two_m, beta_k, beta_l):
    """``|closed - direct|`` for a single pair of displacement parameters."""
    rep = build_rep(two_j)
    V = su2_displacement_batch(rep, [beta_k, beta_l])
    direct = decoherence_direct(V[0], V[1], two_j, two_m).values[0]
    return abs(decoherence_closed(beta_k, beta_l, two_j, two_m) - direct)
