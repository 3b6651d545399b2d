import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_legendre

from cini_invariant.su2 import build_rep, commutator, su2_displacement, su2_displacement_batch, wigner_d_diag

from conftest import expm_displacement


def test_spin_half_matrices():
    rep = build_rep(1)
    assert rep.dim == 2
    np.testing.assert_array_equal(rep.J3, np.diag([0.5, -0.5]))
    np.testing.assert_array_equal(rep.J_plus, [[0, 1], [0, 0]])


def test_spin_one_ladder_entries():
    rep = build_rep(2)
    nz = rep.J_plus[np.nonzero(rep.J_plus)]
    np.testing.assert_allclose(nz, [math.sqrt(2), math.sqrt(2)], rtol=0, atol=1e-15)


@pytest.mark.parametrize("two_j", range(0, 21))
def test_commutation_relations(two_j):
    rep = build_rep(two_j)
    assert np.max(np.abs(commutator(rep.J3, rep.J_plus) - rep.J_plus), initial=0) <= 1e-12
    assert np.max(np.abs(commutator(rep.J3, rep.J_minus) + rep.J_minus), initial=0) <= 1e-12
    assert np.max(np.abs(commutator(rep.J_plus, rep.J_minus) - 2 * rep.J3), initial=0) <= 1e-12
    np.testing.assert_array_equal(rep.J_minus, rep.J_plus.conj().T)
    np.testing.assert_allclose(rep.J2, rep.J2.conj().T, atol=0)
    np.testing.assert_array_equal(rep.J3.diagonal().real, rep.two_j / 2 - np.arange(rep.dim))


def test_rep_is_read_only():
    rep = build_rep(3)
    with pytest.raises(ValueError):
        rep.J_plus[0, 1] = 5


@pytest.mark.parametrize("bad", [-1, 1.5, True])
def test_build_rep_rejects(bad):
    with pytest.raises(ValueError):
        build_rep(bad)


def test_commutator_examples():
    rep = build_rep(4)
    a = rep.J_plus + 0.3 * rep.J3
    np.testing.assert_array_equal(commutator(a, a), np.zeros_like(a))
    with pytest.raises(ValueError):
        commutator(np.eye(2), np.eye(3))


def test_displacement_zero_is_identity():
    np.testing.assert_allclose(su2_displacement(build_rep(5), 0.0), np.eye(6), atol=1e-14)


@pytest.mark.parametrize("z", [0.3, -1.2, 2.9])
def test_spin_half_real_displacement(z):
    expected = np.array([[math.cos(z), math.sin(z)], [-math.sin(z), math.cos(z)]])
    np.testing.assert_allclose(su2_displacement(build_rep(1), z), expected, atol=1e-15)


@pytest.mark.parametrize("two_j", [1, 2, 3, 6, 11])
def test_displacement_matches_pade_exponential(two_j, rng):
    for z in rng.normal(size=5) + 1j * rng.normal(size=5):
        np.testing.assert_allclose(su2_displacement(build_rep(two_j), z), expm_displacement(two_j, z), atol=1e-12)


def test_batch_equals_single(rng):
    rep = build_rep(4)
    zs = rng.normal(size=6) + 1j * rng.normal(size=6)
    batch = su2_displacement_batch(rep, zs)
    for z, u in zip(zs, batch):
        np.testing.assert_allclose(u, su2_displacement(rep, z), atol=1e-14)


complexes = st.complex_numbers(max_magnitude=6.0, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(two_j=st.integers(0, 20), z=complexes)
def test_displacement_unitary_and_invertible(two_j, z):
    rep = build_rep(two_j)
    u = su2_displacement(rep, z)
    eye = np.eye(rep.dim)
    assert np.max(np.abs(u.conj().T @ u - eye)) <= 1e-12
    assert abs(abs(np.linalg.det(u)) - 1) <= 1e-12
    assert np.max(np.abs(u @ su2_displacement(rep, -z) - eye)) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(two_j=st.integers(1, 6), z=complexes, data=st.data())
def test_displacement_diagonal_is_wigner_d(two_j, z, data):
    two_m = data.draw(st.sampled_from(range(-two_j, two_j + 1, 2)))
    rep = build_rep(two_j)
    i = rep.basis_index(two_m)
    u = expm_displacement(two_j, z)
    assert abs(u[i, i] - wigner_d_diag(two_j, two_m, 2 * abs(z))) <= 1e-10


@pytest.mark.parametrize("j", [1, 2, 3, 5, 8])
@pytest.mark.parametrize("theta", [0.0, 0.4, 1.3, 2.7, math.pi])
def test_wigner_d_m0_is_legendre(j, theta):
    assert wigner_d_diag(2 * j, 0, theta) == pytest.approx(eval_legendre(j, math.cos(theta)), abs=1e-12)


@pytest.mark.parametrize("theta", [0.2, 1.0, 2.5])
def test_wigner_d_three_halves(theta):
    # d^{3/2}_{1/2,1/2} = (3 cos(theta) - 1)/2 cos(theta/2)
    expected = 0.5 * (3 * math.cos(theta) - 1) * math.cos(theta / 2)
    assert wigner_d_diag(3, 1, theta) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("two_j", [1, 4, 9, 40, 100])
@pytest.mark.parametrize("theta", [0.3, 1.7, 4.0])
def test_wigner_d_top_is_cos_power(two_j, theta):
    assert wigner_d_diag(two_j, two_j, theta) == pytest.approx(math.cos(theta / 2) ** two_j, rel=1e-12, abs=1e-300)


def test_wigner_d_spot_values():
    assert wigner_d_diag(1, 1, math.pi) == pytest.approx(0.0, abs=1e-16)
    for two_j in range(0, 12):
        for two_m in range(-two_j, two_j + 1, 2):
            assert wigner_d_diag(two_j, two_m, 0.0) == 1.0


@pytest.mark.parametrize("two_j", [32, 40])
def test_wigner_d_log_gamma_branch_matches_exponential(two_j):
    rep = build_rep(two_j)
    u = expm_displacement(two_j, 0.45)
    for two_m in (two_j - 2, 6, 0, -10):
        i = rep.basis_index(two_m)
        assert wigner_d_diag(two_j, two_m, 0.9) == pytest.approx(u[i, i].real, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(two_j=st.integers(0, 12), theta=st.floats(-10, 10), data=st.data())
def test_wigner_d_bounded(two_j, theta, data):
    two_m = data.draw(st.sampled_from(range(-two_j, two_j + 1, 2)))
    assert abs(wigner_d_diag(two_j, two_m, theta)) <= 1 + 1e-12


@pytest.mark.parametrize("args", [(2, 1, 0.1), (2, 4, 0.1), (-1, 1, 0.0)])
def test_wigner_d_rejects_bad_labels(args):
    with pytest.raises(ValueError):
        wigner_d_diag(*args)
