import math

import mpmath as mp
import numpy as np
import pytest

from convexlab import specfun

from oracles import (
    bessel_i_oracle,
    bessel_j_oracle,
    bessel_k_oracle,
    exp_cosh_integral_oracle,
    gaussian_log_integral_check,
    log_rel_err,
    rel_err,
    struve_l0_oracle,
)

# oracle-computed literals, frozen (periodic-trapezoid quadrature of the
# defining integrals at 30+ digits)
I_5_2 = 9.825679323131702e-03
K_0_1 = 4.210244382407083e-01
J_3_15 = 6.096395114113963e-02


def test_bessel_i_trivial_origin():
    assert specfun.bessel_i(0, 0.0).value == 1.0
    assert specfun.bessel_i(1, 0.0).value == 0.0
    assert specfun.bessel_i(1, 0.0).log_value == -math.inf


def test_bessel_i_frozen_oracle_value():
    r = specfun.bessel_i(5, 2.0)
    assert abs(r.value - I_5_2) <= 1e-12 * I_5_2


def test_bessel_i_live_oracle():
    for (n, x) in [(5, 2.0), (17, 0.5), (3, 100.0), (40, 7.0)]:
        lv = specfun.bessel_i(n, x).log_value
        oracle = bessel_i_oracle(n, x, log_hint=lv)
        assert float(log_rel_err(lv, mp.log(oracle))) <= 1e-12


def test_bessel_i_generating_identity_sum():
    # sum over all orders of I_n(1) = e
    table = specfun.log_bessel_i_all(1.0, 60)
    total = np.exp(table[0]) + 2.0 * np.exp(table[1:]).sum()
    assert abs(total - math.e) <= 1e-13 * math.e


def test_bessel_i_symmetry_and_domain():
    assert specfun.bessel_i(-7, 3.0).value == specfun.bessel_i(7, 3.0).value
    with pytest.raises(ValueError):
        specfun.bessel_i(2, -1.0)


def test_bessel_i_underflow_clamped_log_still_exact():
    r = specfun.bessel_i(900, 1.0)
    assert r.status == specfun.UNDERFLOW_CLAMPED
    assert r.value == 0.0
    with mp.workdps(30):
        ref = float(mp.log(mp.besseli(900, 1)))
    assert abs(r.log_value - ref) <= 1e-10 * abs(ref)


def test_specfun_result_roundtrip_invariant():
    for (n, x) in [(0, 0.3), (4, 2.5), (12, 40.0)]:
        r = specfun.bessel_i(n, x)
        assert r.status == specfun.EXACT
        assert abs(math.exp(r.log_value) - r.value) <= 1e-13 * r.value


def test_bessel_k_oracle_and_frozen():
    r = specfun.bessel_k(0, 1.0)
    assert abs(r.value - K_0_1) <= 1e-12 * K_0_1
    for (n, x) in [(0, 1.0), (2, 0.7), (10, 3.0), (5, 60.0)]:
        lv = specfun.bessel_k(n, x).log_value
        assert float(log_rel_err(lv, mp.log(bessel_k_oracle(n, x)))) <= 1e-12


def test_bessel_k_symmetry_recurrence_domain():
    for x in (0.4, 2.0, 9.5):
        assert specfun.bessel_k(-3, x).value == specfun.bessel_k(3, x).value
        t = specfun.log_bessel_k_all(x, 12)
        for n in range(1, 11):
            resid = 1.0 - math.exp(t[n - 1] - t[n + 1]) - (2 * n / x) * math.exp(t[n] - t[n + 1])
            assert abs(resid) <= 1e-10
    with pytest.raises(ValueError):
        specfun.bessel_k(1, 0.0)


def test_bessel_k_turan_sign():
    # K_j^2 < K_{j-1} K_{j+1} at (j, x) = (2, 0.7)
    t = specfun.log_bessel_k_all(0.7, 3)
    assert 2 * t[2] < t[1] + t[3]


def test_bessel_j_trivials_and_oracle():
    assert specfun.bessel_j(0, 0.0) == 1.0
    assert specfun.bessel_j(3, 0.0) == 0.0
    assert abs(specfun.bessel_j(3, 1.5) - J_3_15) <= 1e-12 * J_3_15
    for (n, x) in [(3, 1.5), (0, 2.0), (25, 4.0), (7, 900.0)]:
        got = specfun.bessel_j(n, x)
        assert float(rel_err(got, bessel_j_oracle(n, x))) <= 1e-12


def test_bessel_j_unitarity_sum():
    logs, _ = specfun.log_bessel_j_all(4.0, 140)
    s = math.exp(2 * logs[0]) + 2.0 * np.exp(2 * logs[1:]).sum()
    assert abs(s - 1.0) <= 1e-12


def test_bessel_j_negative_order():
    assert specfun.bessel_j(-3, 2.0) == -specfun.bessel_j(3, 2.0)
    assert specfun.bessel_j(-4, 2.0) == specfun.bessel_j(4, 2.0)


def test_struve_l0_series_and_oracle():
    assert specfun.struve_l0(0.0) == 0.0
    for x in (0.5, 3.0, 10.0, 19.0, 30.0, 100.0):
        assert float(rel_err(specfun.struve_l0(x), struve_l0_oracle(x))) <= 1e-10


def test_struve_remainder_bound_paper_anchors():
    # |pi (I0 - L0) - 2/s| <= 16/s^3 at s = 10 and s = 50
    for s in (10.0, 50.0):
        r = abs(math.pi * specfun.i0_minus_struve_l0(s) - 2.0 / s)
        assert r <= 16.0 / s**3


def test_asymb_defect_bounds():
    assert specfun.asymb_defect(10, 1.0) <= 0.06
    assert specfun.asymb_defect(100, 0.5) <= 0.006
    assert specfun.asymb_defect(1, 1.0) <= 0.6


def test_generating_identity_grid():
    # |sum_{|j|<=J} I_j(a) e^{-j y} - e^{a cosh y}| <= 1e-10 e^{a cosh y}, J >= 60
    for a in (0.5, 1.0, 2.0):
        table = specfun.log_bessel_i_all(a, 60)
        n = np.arange(1, 61)
        for y in np.linspace(-3.0, 3.0, 7):
            terms = np.concatenate([[table[0]], table[1:] - n * y, table[1:] + n * y])
            m = terms.max()
            total = m + math.log(np.exp(terms - m).sum())
            assert abs(math.expm1(total - a * math.cosh(y))) <= 1e-10


def test_amos_inequality_grid():
    # I_j^2 - I_{j+1} I_{j-1} > 0 on j in [-1, 200], x in (0, 100]
    xs = np.logspace(-3, 2, 120)
    L = specfun.log_bessel_i_grid(xs, 202)
    js = np.arange(-1, 201)
    margin = 2.0 * L[np.abs(js)] - L[np.abs(js + 1)] - L[np.abs(js - 1)]
    assert margin.min() > 0.0


def test_integral_representations():
    # int e^{lam j - a cosh lam} = 2 K_j(a); int e^{2 sqrt(a) lam j - lam^2/2} = sqrt(2pi) e^{2aj^2}
    for a in (0.5, 1.0, 2.0):
        for j in (0, 3, 17, 30):
            lhs = exp_cosh_integral_oracle(j, a)
            rhs_log = math.log(2.0) + specfun.log_bessel_k_all(a, max(j, 1))[j]
            with mp.workdps(40):
                assert abs(float(mp.log(lhs) - rhs_log)) <= 1e-8
            assert gaussian_log_integral_check(j, a) <= 1e-8


def test_grid_tables_match_scalar():
    xs = np.array([0.3, 1.7, 42.0])
    gi = specfun.log_bessel_i_grid(xs, 25)
    gk = specfun.log_bessel_k_grid(xs, 25)
    for c, x in enumerate(xs):
        si = specfun.log_bessel_i_all(float(x), 25)
        sk = specfun.log_bessel_k_all(float(x), 25)
        assert np.max(np.abs(gi[:, c] - si)) <= 1e-12 * np.max(np.abs(si))
        assert np.max(np.abs(gk[:, c] - sk)) <= 1e-12 * np.max(np.abs(sk))


def test_ratio_grids_consistent_with_tables():
    xs = np.array([0.05, 0.9, 12.0, 300.0])
    ri = specfun.log_bessel_i_ratio_grid(xs, 30)
    rk = specfun.log_bessel_k_ratio_grid(xs, 30)
    ti = specfun.log_bessel_i_grid(xs, 31)
    tk = specfun.log_bessel_k_grid(xs, 31)
    assert np.max(np.abs(ri - (ti[1:] - ti[:-1]))) <= 1e-10
    assert np.max(np.abs(rk - (tk[1:] - tk[:-1]))) <= 1e-10


def test_self_test_green():
    report = specfun.self_test()
    for name, entry in report.items():
        assert entry["ok"], f"{name}: {entry}"
