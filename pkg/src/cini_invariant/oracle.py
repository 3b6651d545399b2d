"""Reference propagation of ``i d psi/dt = H(t) psi`` by the exponential midpoint rule.

Each step applies ``exp(-i h H(t_i + h/2))`` computed from a Hermitian
eigendecomposition, so norms are preserved to rounding.  Nothing here uses the
invariant machinery; it is the independent check for it.
"""

import numpy as np

HERMITIAN_TOL = 1e-10


def _hamiltonian_samples(hamiltonian, times):
    """Accept either a batch callable or a per-time callable."""
    try:
        hs = np.asarray(hamiltonian(times))
        if hs.ndim == 3 and hs.shape[0] == len(times):
            return hs
    except (TypeError, ValueError):
        pass
    return np.stack([np.asarray(hamiltonian(float(t))) for t in times])


def step_unitaries(hamiltonian, grid):
    """``exp(-i h H(t_i + h/2))`` for every step; shape ``(steps, dim, dim)``."""
    mids = grid.nodes[:-1] + 0.5 * grid.h
    hs = _hamiltonian_samples(hamiltonian, mids)
    skew = np.max(np.abs(hs - np.conj(np.swapaxes(hs, 1, 2))), axis=(1, 2))
    if np.any(skew > HERMITIAN_TOL):
        i = int(np.argmax(skew > HERMITIAN_TOL))
        raise ValueError(f"Hamiltonian is not Hermitian at t = {mids[i]:.17g} (deviation {skew[i]:.3e})")
    hs = 0.5 * (hs + np.conj(np.swapaxes(hs, 1, 2)))
    w, v = np.linalg.eigh(hs)
    return np.einsum("nik,nk,njk->nij", v, np.exp(-1j * grid.h * w), v.conj(), optimize=True)


def direct_propagate(hamiltonian, psi0, grid, tol=1e-10):
    """State at every node of ``grid``; shape ``(steps + 1, dim)``.

    ``hamiltonian`` maps a time (or an array of times) to the matrix
    (or a stack of matrices).
    """
    psi0 = np.asarray(psi0, dtype=complex)
    norm = np.linalg.norm(psi0)
    if abs(norm - 1) > tol:
        raise ValueError(f"initial state is not normalised (norm = {norm:.12g})")
    steps = step_unitaries(hamiltonian, grid)
    out = np.empty((grid.steps + 1, psi0.size), dtype=complex)
    out[0] = psi0
    psi = psi0
    for i, u in enumerate(steps):
        psi = u @ psi
        out[i + 1] = psi
    return out


def unitary_propagator(hamiltonian, grid):
    """Accumulated products ``U(t_i)`` with ``U(t0) = 1``; shape ``(steps + 1, dim, dim)``."""
    steps = step_unitaries(hamiltonian, grid)
    dim = steps.shape[-1]
    out = np.empty((grid.steps + 1, dim, dim), dtype=complex)
    out[0] = np.eye(dim)
    for i, u in enumerate(steps):
        out[i + 1] = u @ out[i]
    return out


def fidelity(traj_a, traj_b):
    """Minimum over nodes of ``|<a(t_i)|b(t_i)>|``."""
    a = np.asarray(traj_a)
    b = np.asarray(traj_b)
    if a.shape != b.shape:
        raise ValueError(f"trajectory shapes differ: {a.shape} vs {b.shape}")
    return float(np.min(np.abs(np.einsum("ni,ni->n", a.conj(), b))))
