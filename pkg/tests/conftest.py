import numpy as np
import pytest
from scipy.linalg import expm

from cini_invariant.su2 import build_rep


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def expm_displacement(two_j, zeta):
    """Independent reference: scipy's Pade exponential of the generator."""
    rep = build_rep(two_j)
    return expm(zeta * rep.J_plus - np.conj(zeta) * rep.J_minus)


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)
