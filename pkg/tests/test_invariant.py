import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cini_invariant.errors import NonFiniteError, SingularityError
from cini_invariant.invariant import (
    AuxiliaryTrajectory,
    TimeGrid,
    beta_from_aux,
    build_V,
    check_invariant_ode,
    check_transformed_invariant,
    integrate_auxiliary,
    invariant_matrix,
    transformed_h_coefficient,
    transformed_h_coefficients,
    transformed_hamiltonian_residual,
)
from cini_invariant.model import (
    ComplexSchedule,
    Constant,
    DetectorParams,
    LevelParams,
    Linear,
    hamiltonian_batch,
    spherical_source,
)
from cini_invariant.phases import aligned_start
from cini_invariant.presets import preset
from cini_invariant.runner import run_branch
from cini_invariant.su2 import build_rep

HALF_PI = math.pi / 2


def pure_j2(c=1.0):
    det = DetectorParams(Constant(0.5), Constant(0.5))
    return det, LevelParams(Constant(0.0), ComplexSchedule(Constant(c / 2), Constant(-HALF_PI)))


def constant_drive():
    det = DetectorParams(Constant(1.3), Constant(0.4))
    return det, LevelParams(Constant(0.2), ComplexSchedule(Constant(0.35), Constant(0.6)))


def test_time_grid():
    g = TimeGrid(1.0, 3.0, 4)
    assert g.h == 0.5
    np.testing.assert_allclose(g.nodes, [1.0, 1.5, 2.0, 2.5, 3.0])
    for bad in (1, 0, 2.5):
        with pytest.raises(ValueError):
            TimeGrid(0.0, 1.0, bad)
    with pytest.raises(ValueError):
        TimeGrid(1.0, 1.0, 10)


def test_pure_j2_drive_is_linear_in_time():
    src = spherical_source(*pure_j2(), n=1.0)
    grid = TimeGrid(0.0, 10.0, 5000)
    tr = integrate_auxiliary(src, 0.1, 0.0, grid)
    assert np.max(np.abs(tr.lam - (0.1 + grid.nodes))) <= 1e-8
    assert np.max(np.abs(tr.gamma)) <= 1e-8
    assert len(tr.lam) == len(tr.gamma) == len(tr.gamma_dot) == grid.steps + 1


def test_aligned_start_is_a_fixed_point():
    det, lvl = constant_drive()
    src = spherical_source(det, lvl, 1.0)
    l0, g0 = aligned_start(src, 0.0)
    tr = integrate_auxiliary(src, l0, g0, TimeGrid(0.0, 10.0, 1000))
    assert np.max(np.abs(tr.lam - l0)) <= 1e-10
    assert np.max(np.abs(tr.gamma - g0)) <= 1e-10


def test_rk4_fourth_order():
    cfg = preset("sinusoidal")
    lvl = cfg.level(0).params
    src = spherical_source(cfg.detector, lvl, cfg.label.n)
    l0, g0 = aligned_start(src, 0.0)
    n = 100
    ref = integrate_auxiliary(src, l0, g0, TimeGrid(0.0, 5.0, 8 * 2 * n))

    def err(steps):
        tr = integrate_auxiliary(src, l0, g0, TimeGrid(0.0, 5.0, steps))
        stride = 16 * n // steps
        return max(np.max(np.abs(tr.lam - ref.lam[::stride])), np.max(np.abs(tr.gamma - ref.gamma[::stride])))

    ratio = err(n) / err(2 * n)
    assert 12 <= ratio <= 20


def test_singularity_at_start_with_coupling():
    src = spherical_source(*pure_j2(), n=1.0)
    with pytest.raises(SingularityError) as exc:
        integrate_auxiliary(src, 0.0, 0.0, TimeGrid(0.0, 1.0, 10))
    assert exc.value.t == 0.0


def test_singularity_reports_first_time():
    src = spherical_source(*pure_j2(), n=1.0)
    with pytest.raises(SingularityError) as exc:
        integrate_auxiliary(src, 1.0, 0.0, TimeGrid(0.0, 4.0, 400), eps_sing=0.5)
    # lam = 1 + t reaches sin(lam) = 0.5 at t = 5 pi / 6 - 1
    assert exc.value.t == pytest.approx(5 * math.pi / 6 - 1, abs=0.01)


def test_non_finite_detected():
    det = DetectorParams(Constant(float("nan")), Constant(0.0))
    lvl = LevelParams(Constant(0.0), ComplexSchedule(Constant(0.3)))
    with pytest.raises(NonFiniteError):
        integrate_auxiliary(spherical_source(det, lvl, 1.0), 1.0, 0.0, TimeGrid(0.0, 1.0, 10))


def test_degenerate_branch():
    det = DetectorParams(Linear(1.0, 0.2), Constant(0.3))
    lvl = LevelParams(Constant(0.0), ComplexSchedule(Constant(0.0)))
    grid = TimeGrid(0.0, 2.0, 200)
    tr = integrate_auxiliary(spherical_source(det, lvl, 1.0), 0.0, 0.0, grid)
    assert tr.degenerate
    assert np.all(tr.lam == 0.0)
    t = grid.nodes
    np.testing.assert_allclose(tr.gamma, 0.7 * t + 0.1 * t**2, atol=1e-12)
    np.testing.assert_allclose(tr.gamma_dot, 0.7 + 0.2 * t, atol=1e-12)


def test_beta_examples():
    grid = TimeGrid(0.0, 1.0, 2)
    tr = AuxiliaryTrajectory(grid, np.array([HALF_PI, 0.0, 1.0]), np.array([0.0, 0.3, HALF_PI]), np.zeros(3), np.zeros(3))
    beta = beta_from_aux(tr).beta
    assert beta[0] == pytest.approx(-math.pi / 4)
    assert beta[1] == 0
    assert beta[2] == pytest.approx(0.5j)


def test_invariant_matrix_examples():
    rep = build_rep(4)
    np.testing.assert_array_equal(invariant_matrix(0.0, 1.1, rep), rep.J3)
    j1 = (rep.J_plus + rep.J_minus) / 2
    np.testing.assert_allclose(invariant_matrix(HALF_PI, 0.0, rep), j1, atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(lam=st.floats(-7, 7), gam=st.floats(-7, 7), two_j=st.integers(1, 8))
def test_invariant_spectrum_and_transformation(lam, gam, two_j):
    rep = build_rep(two_j)
    inv = invariant_matrix(lam, gam, rep)
    assert np.max(np.abs(inv - inv.conj().T)) == 0
    np.testing.assert_allclose(np.linalg.eigvalsh(inv), np.sort(rep.m_values), atol=1e-10)
    V = build_V(-(lam / 2) * np.exp(-1j * gam), rep)
    assert np.max(np.abs(V.conj().T @ inv @ V - rep.J3)) <= 1e-10


def test_build_V_examples():
    rep = build_rep(3)
    np.testing.assert_array_equal(build_V(0.0, rep), np.eye(4))
    V = build_V(0.4 - 0.9j, rep)
    np.testing.assert_allclose(V @ V.conj().T, np.eye(4), atol=1e-12)


def test_transformed_invariant_checks():
    grid = TimeGrid(0.0, 1.0, 50)
    zero = AuxiliaryTrajectory(grid, np.zeros(51), np.linspace(0, 3, 51), np.zeros(51), np.zeros(51))
    assert check_transformed_invariant(zero, build_rep(3)) == 0.0
    t = grid.nodes
    wiggly = AuxiliaryTrajectory(grid, 1.2 + 0.8 * np.sin(3 * t), 2 * np.cos(t) + t**2, np.zeros(51), np.zeros(51))
    assert check_transformed_invariant(wiggly, build_rep(4)) <= 1e-10
    br = run_branch(preset("special_case"), 0)
    assert check_transformed_invariant(br.trajectory, build_rep(1)) <= 1e-10


def _ode_residual(cfg):
    br = run_branch(cfg, 0)
    hams = hamiltonian_batch(cfg.detector, cfg.level(0).params, cfg.label, cfg.grid.nodes, br.rep)
    return check_invariant_ode(br.trajectory, hams, cfg.grid), br, hams


def test_invariant_ode_residual_at_fixed_point():
    res, _, _ = _ode_residual(preset("fixed_point", grid={"t0": 0.0, "t1": 5.0, "steps": 500}))
    assert res <= 1e-12


def test_invariant_ode_residual_converges():
    cfg = preset("special_case")
    coarse, _, _ = _ode_residual(cfg)
    fine, _, _ = _ode_residual(preset("special_case", grid={"t0": 0.0, "t1": 10.0, "steps": 20000}))
    assert coarse <= 1e-5
    assert 3.5 <= coarse / fine <= 4.5


def test_invariant_ode_negative_control():
    cfg = preset("sinusoidal", grid={"t0": 0.0, "t1": 10.0, "steps": 2000})
    _, br, hams = _ode_residual(cfg)
    tr = br.trajectory
    frozen = AuxiliaryTrajectory(tr.grid, tr.lam, np.full_like(tr.gamma, tr.gamma[0]), tr.lam_dot, tr.gamma_dot)
    assert check_invariant_ode(frozen, hams, cfg.grid) >= 1e-2


def test_invariant_ode_needs_aligned_samples():
    cfg = preset("fixed_point", grid={"t0": 0.0, "t1": 1.0, "steps": 10})
    _, br, hams = _ode_residual(cfg)
    with pytest.raises(ValueError):
        check_invariant_ode(br.trajectory, hams[:-1], cfg.grid)


def test_spectrum_of_invariant_is_constant_along_solution():
    br = run_branch(preset("sinusoidal", grid={"t0": 0.0, "t1": 10.0, "steps": 1000}), 0)
    tr = br.trajectory
    for i in range(0, 1001, 50):
        vals = np.linalg.eigvalsh(invariant_matrix(tr.lam[i], tr.gamma[i], br.rep))
        np.testing.assert_allclose(vals, np.sort(br.rep.m_values), atol=1e-10)


def test_transformed_coefficient_examples():
    det, lvl = constant_drive()
    src = spherical_source(det, lvl, 1.0)
    grid = TimeGrid(0.0, 2.0, 100)
    l0, g0 = aligned_start(src, 0.0)
    tr = integrate_auxiliary(src, l0, g0, grid)
    sp = src(grid.nodes)
    assert transformed_h_coefficient(tr, sp, 37) == pytest.approx(sp.c[37], abs=1e-10)

    zero = AuxiliaryTrajectory(grid, np.zeros(101), np.zeros(101), np.zeros(101), np.zeros(101))
    assert transformed_h_coefficient(zero, sp, 5) == pytest.approx(1.3 - 0.4)

    src2 = spherical_source(*pure_j2(), n=1.0)
    tr2 = integrate_auxiliary(src2, 0.1, 0.0, grid)
    coeffs = transformed_h_coefficients(tr2, src2(grid.nodes))
    assert np.max(np.abs(coeffs)) <= 1e-12


def test_transformed_hamiltonian_is_diagonal_to_second_order():
    def offdiag(steps):
        cfg = preset("sinusoidal", grid={"t0": 0.0, "t1": 5.0, "steps": steps})
        br = run_branch(cfg, 0)
        hams = hamiltonian_batch(cfg.detector, cfg.level(0).params, cfg.label, cfg.grid.nodes, br.rep)
        return transformed_hamiltonian_residual(br.trajectory, br.spherical, hams, br.rep)

    total1, off1 = offdiag(500)
    total2, off2 = offdiag(1000)
    assert off1 <= 1e-3 and total1 <= 1e-3
    assert 3.0 <= off1 / off2 <= 5.0
