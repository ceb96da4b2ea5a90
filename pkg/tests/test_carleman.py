import math

import numpy as np
import pytest

from convexlab.carleman import (
    CarlemanParams,
    QuadratureError,
    SpaceTimeField,
    WindowGuardError,
    build_cutoffs,
    bump_test_function,
    carleman_log_weight,
    cutoff_boundary_terms,
    eqc_quadratic_form,
    eta_cutoff,
    eta_cutoff_deriv,
    mu0,
    recommended_time_nodes,
    theta_cutoff,
    verify_carleman,
)
from convexlab.evolve import free_evolution_exact
from convexlab.lattice import Field, LatticeWindow


def test_mu0_value_and_residual():
    m = mu0()
    assert abs(m - 0.255413) <= 1e-6
    assert 0.25 < m < 0.26
    assert abs(math.cosh(m) ** 2 - 2.0 * math.sinh(2.0 * m)) <= 1e-13
    # bracketing: the defining function changes sign across the root
    f = lambda t: math.cosh(t) ** 2 - 2.0 * math.sinh(2.0 * t)
    assert f(m - 1e-3) > 0 > f(m + 1e-3)


def test_carleman_log_weight_formulas():
    p = CarlemanParams(mu=0.7, eps=0.2, big_r=12.0)
    for j in (-3, 0, 5):
        assert abs(carleman_log_weight((j,), 0.0, p) - 0.7 * j * j) <= 1e-12
    # t = 1/2, j = 0: mu R^2/16 - (1+eps) R^2 / (64 mu)
    expected = 0.7 * 144.0 / 16.0 - 1.2 * 144.0 / (64.0 * 0.7)
    assert abs(carleman_log_weight((0,), 0.5, p) - expected) <= 1e-12
    # symmetry t <-> 1 - t
    for t in (0.1, 0.3, 0.45):
        for j in (-4, 2):
            a = carleman_log_weight((j,), t, p)
            b = carleman_log_weight((j,), 1.0 - t, p)
            assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


def test_verify_zero_function():
    w = LatticeWindow(dim=1, radius=(6,))
    g = bump_test_function(w, 4)
    zero = g.__class__(w, g.times, np.zeros_like(g.values), np.zeros_like(g.dvalues))
    rep = verify_carleman(zero, CarlemanParams(mu=0.6, eps=0.1, big_r=50.0))
    assert rep.verdict and rep.ratio == 0.0


def test_verify_bump_r50():
    w = LatticeWindow(dim=1, radius=(10,))
    p = CarlemanParams(mu=0.6, eps=0.1, big_r=50.0)
    g = bump_test_function(w, 8, n_times=recommended_time_nodes(p, 8))
    rep = verify_carleman(g, p)
    assert rep.verdict
    assert rep.lhs_log < rep.rhs_log


def test_verify_margin_does_not_collapse_when_r_doubles():
    w = LatticeWindow(dim=1, radius=(10,))
    ratios = []
    for r in (50.0, 100.0, 200.0):
        p = CarlemanParams(mu=0.6, eps=0.1, big_r=r)
        g = bump_test_function(w, 8, n_times=recommended_time_nodes(p, 8))
        rep = verify_carleman(g, p)
        assert rep.verdict
        ratios.append(rep.ratio)
    assert max(ratios) < 1.0
    assert ratios[1] <= ratios[0] * 1.05 and ratios[2] <= ratios[1] * 1.05


def test_verify_oscillatory_bump():
    w = LatticeWindow(dim=1, radius=(8,))
    p = CarlemanParams(mu=1.0, eps=0.05, big_r=50.0)
    g = bump_test_function(w, 6, oscillation=0.5, n_times=recommended_time_nodes(p, 6))
    rep = verify_carleman(g, p)
    assert rep.verdict


def test_test_function_validation():
    w = LatticeWindow(dim=1, radius=(6,))
    with pytest.raises(WindowGuardError):
        bump_test_function(w, 5)          # no 2-site boundary ring
    with pytest.raises(ValueError):
        bump_test_function(w, 4, t_halfwidth=0.6)
    with pytest.raises(ValueError):
        bump_test_function(w, 4, n_times=100)


def test_eqc_quadratic_form_t_half_manifestly_nonneg():
    # at t = 1/2 the odd coupling vanishes and the form is a positive diagonal
    p = CarlemanParams(mu=0.6, eps=0.1, big_r=50.0)
    w = LatticeWindow(dim=1, radius=(180,))
    q = eqc_quadratic_form(p, 0.5, w)
    assert q.min_rayleigh >= 0.0
    assert q.bare_min >= 0.0
    assert q.target == pytest.approx(0.1 * 2500.0 / 4.8)


def test_eqc_quadratic_form_sweep_point():
    p = CarlemanParams(mu=1.0, eps=0.05, big_r=200.0)
    w = LatticeWindow(dim=1, radius=(220,))
    for t in (0.05, 0.3, 0.7, 0.95):
        q = eqc_quadratic_form(p, t, w)
        assert q.min_rayleigh >= -1e-8 * q.target
        assert q.bare_min >= -1e-8 * q.target   # the display itself is nonnegative here


def test_eqc_window_guard():
    p = CarlemanParams(mu=0.6, eps=0.1, big_r=200.0)
    with pytest.raises(WindowGuardError):
        eqc_quadratic_form(p, 0.5, LatticeWindow(dim=1, radius=(40,)))


def test_cutoff_profiles():
    j = np.arange(-50, 51)
    th = theta_cutoff(j, 10)
    assert np.all(th[np.abs(j) <= 10] == 1.0)
    assert np.all(th[np.abs(j) >= 20] == 0.0)
    assert np.all((0.0 <= th) & (th <= 1.0))
    t = np.linspace(0, 1, 2001)
    et = eta_cutoff(t, 8.0)
    assert np.all(et[(t >= 1 / 8) & (t <= 1 - 1 / 8)] == 1.0)
    assert np.all(et[(t <= 1 / 16) | (t >= 1 - 1 / 16)] == 0.0)
    # derivative consistent with finite differences on the smooth part
    h = t[1] - t[0]
    fd = np.gradient(et, h, edge_order=2)
    an = eta_cutoff_deriv(t, 8.0)
    assert np.max(np.abs(fd - an)) <= 1e-3 * np.max(np.abs(an))


def _solution_spacetime(window, times, data_field):
    vals = np.empty((len(times),) + window.shape, dtype=complex)
    dvals = np.empty_like(vals)
    from convexlab.lattice import laplacian
    for i, t in enumerate(times):
        ut = free_evolution_exact(data_field, float(t))
        vals[i] = ut.values
        dvals[i] = 1j * laplacian(ut).values
    return SpaceTimeField(window, tuple(times), vals, dvals)


def test_build_cutoffs_residual_matches_formula():
    w = LatticeWindow(dim=1, radius=(30,))
    f0 = Field.from_profile(w, lambda j: np.exp(-0.8 * j.astype(float) ** 2))
    times = np.linspace(0, 1, 161)
    u = _solution_spacetime(w, times, f0)
    res = build_cutoffs(u, m=10, r_cut=4.0)
    assert res.mismatch <= 1e-8
    # residual lives on the theta ring or the eta transition layers
    grids = w.coordinate_grids()
    ring = (np.abs(grids[0]) >= 10) & (np.abs(grids[0]) <= 20)
    eta_layer = (res.eta > 0) & (res.eta < 1)
    for i, t in enumerate(times):
        off = ~ring & ~np.full(w.shape, eta_layer[i])
        inner_plateau = off & (np.abs(grids[0]) < 10)
        assert np.max(np.abs(res.residual[i][inner_plateau]), initial=0.0) <= 1e-12


def test_build_cutoffs_support_only_m_large():
    # M covering the support: the spatial commutator piece vanishes identically
    w = LatticeWindow(dim=1, radius=(30,))
    vals = np.zeros(w.shape, dtype=complex)
    vals[w.index_of((0,))] = 1.0
    vals[w.index_of((1,))] = 0.5
    f0 = Field(w, vals)
    times = np.linspace(0, 1, 161)
    u = _solution_spacetime(w, times, f0)
    res = build_cutoffs(u, m=14, r_cut=4.0)
    # inside the eta plateau the residual vanishes (支持 is inside the theta plateau)
    plateau = (res.eta == 1.0)
    sup = max(np.max(np.abs(res.residual[i])) for i in range(len(times)) if plateau[i])
    spread = np.abs(u.values[len(times) // 2])
    assert sup <= 1e-10 * np.max(spread)


def test_build_cutoffs_random_spacetime_field_two_formulas():
    # arbitrary (non-solution) space-time field with analytic derivative:
    # the algebraic identity between the two residual forms still holds
    w = LatticeWindow(dim=1, radius=(24,))
    rng = np.random.default_rng(17)
    profile = rng.standard_normal(w.shape) + 1j * rng.standard_normal(w.shape)
    times = np.linspace(0, 1, 201)
    om = 3.0
    vals = np.cos(om * times)[:, None] * profile[None, :]
    dvals = -om * np.sin(om * times)[:, None] * profile[None, :]
    u = SpaceTimeField(w, tuple(times), vals.astype(complex), dvals.astype(complex))
    res = build_cutoffs(u, m=8, r_cut=4.0)
    assert res.mismatch <= 1e-8


def test_build_cutoffs_finite_difference_path():
    w = LatticeWindow(dim=1, radius=(20,))
    rng = np.random.default_rng(19)
    profile = rng.standard_normal(w.shape)
    times = np.linspace(0, 1, 2001)
    vals = (np.sin(2.0 * times + 0.3)[:, None] * profile[None, :]).astype(complex)
    u = SpaceTimeField(w, tuple(times), vals, None)
    res = build_cutoffs(u, m=6, r_cut=4.0)
    assert res.mismatch <= 1e-8
    coarse = SpaceTimeField(w, tuple(times[::100]), vals[::100], None)
    with pytest.raises(QuadratureError):
        build_cutoffs(coarse, m=6, r_cut=4.0)


def test_boundary_terms_m_minus_two_decay():
    lam, eps = 0.6, 0.01
    mu = 0.55
    p = CarlemanParams(mu=mu, eps=eps, big_r=50.0)
    w = LatticeWindow(dim=1, radius=(90,))
    f0 = Field.from_profile(w, lambda j: np.exp(-0.8 * j.astype(float) ** 2))
    logs = []
    for m in (20, 40):
        terms = cutoff_boundary_terms(f0, m, p, lam, n_times=161)
        logs.append(terms["term_theta_log"])
    slope = (logs[1] - logs[0]) / math.log(2.0)
    assert -2.6 <= slope <= -1.4
