"""Acceptance gate: one test per criterion, each printing its PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.
"""

import math
import time

import mpmath as mp
import numpy as np

from convexlab.carleman import (
    CarlemanParams,
    SpaceTimeField,
    build_cutoffs,
    bump_test_function,
    cutoff_boundary_terms,
    eqc_quadratic_form,
    mu0,
    recommended_time_nodes,
    verify_carleman,
)
from convexlab.commutator import (
    assemble,
    commutator_form,
    eq1_expression,
    eq1_scan,
    gaussian_closed_form,
    lambda_scan,
    turan_scan,
)
from convexlab.convexity import apriori_estimates, convexity_report, sample_series
from convexlab.cli import hardy_experiment
from convexlab.evolve import (
    EvolutionConfig,
    Potential,
    evolve_free_convolution,
    evolve_free_spectral,
    evolve_potential,
    free_evolution_exact,
)
from convexlab.lattice import Field, LatticeWindow, laplacian
from convexlab.specfun import (
    asymb_defect_all,
    bessel_j,
    i0_minus_struve_l0,
    log_bessel_i_all,
    log_bessel_j_all,
    log_bessel_k_all,
    struve_l0,
)
from convexlab.weights import BesselKWeight, GaussianWeight, InverseBesselWeight

from oracles import bessel_i_oracle, bessel_j_oracle, bessel_k_oracle, struve_l0_oracle

X_SET = (0.1, 1.0, 10.0, 100.0)
SPLIT_CFG = EvolutionConfig.for_time(1.0, method="split_step", dt=1e-3)


class Criterion:
    def __init__(self, n, budget_s):
        self.n = n
        self.budget = budget_s
        self.t0 = time.time()

    def finish(self, ok: bool, detail: str = ""):
        dt = time.time() - self.t0
        print(f"[criterion {self.n}] {'PASS' if ok else 'FAIL'} ({dt:.1f}s / budget {self.budget}s) {detail}")
        assert ok, f"criterion {self.n}: {detail}"
        assert dt < self.budget, f"criterion {self.n} exceeded its {self.budget}s budget ({dt:.1f}s)"


def compact_random(window, rng, half=2):
    vals = np.zeros(window.shape, dtype=complex)
    box = tuple(slice(r - half, r + half + 1) for r in window.radius)
    vals[box] = rng.standard_normal((2 * half + 1,) * window.dim) \
        + 1j * rng.standard_normal((2 * half + 1,) * window.dim)
    return Field(window, vals)


def inner_random(window, rng):
    return compact_random(window, rng, half=min(window.radius) // 2)


def test_criterion_1_specfun_oracles():
    c = Criterion(1, 30)
    worst = 0.0
    for x in X_SET:
        table_i = log_bessel_i_all(x, 50)
        table_k = log_bessel_k_all(x, 50)
        logs_j, _ = log_bessel_j_all(x, 50)
        for j in range(0, 51):
            oi = bessel_i_oracle(j, x, log_hint=float(table_i[j]))
            with mp.workdps(40):
                worst = max(worst, abs(math.expm1(float(table_i[j] - mp.log(oi)))))
            ok = bessel_k_oracle(j, x)
            with mp.workdps(40):
                worst = max(worst, abs(math.expm1(float(table_k[j] - mp.log(ok)))))
            oj = bessel_j_oracle(j, x, log_hint=float(logs_j[j]))
            got = bessel_j(j, x)
            denom = max(abs(float(oj)), 1e-300)
            worst = max(worst, abs(got - float(oj)) / denom)
    ok_i = worst <= 1e-12
    worst_l0 = max(abs(struve_l0(x) - float(struve_l0_oracle(x))) / float(struve_l0_oracle(x))
                   for x in X_SET)
    gen_worst = 0.0
    for a in (0.5, 1.0, 2.0):
        table = log_bessel_i_all(a, 80)
        n = np.arange(1, 81)
        for y in np.linspace(-3, 3, 7):
            terms = np.concatenate([[table[0]], table[1:] - n * y, table[1:] + n * y])
            m = terms.max()
            total = m + math.log(np.exp(terms - m).sum())
            gen_worst = max(gen_worst, abs(math.expm1(total - a * math.cosh(y))))
    c.finish(ok_i and worst_l0 <= 1e-10 and gen_worst <= 1e-10,
             f"bessel worst rel {worst:.2e}, struve {worst_l0:.2e}, gen id {gen_worst:.2e}")


def test_criterion_2_paper_number_anchors():
    c = Criterion(2, 60)
    m0 = mu0()
    ok_mu = abs(m0 - 0.255413) <= 1e-6
    ok_struve = True
    for s in np.logspace(math.log10(2.0), 3.0, 40):
        r = abs(math.pi * i0_minus_struve_l0(float(s)) - 2.0 / s)
        ok_struve &= r <= 16.0 / s**3
    ok_asymb = True
    for alpha in (0.5, 1.0, 2.0):
        defects = asymb_defect_all(1000, alpha)
        bound = 3.0 / (5.0 * np.arange(1, 1001))
        ok_asymb &= bool(np.all(defects <= bound))
    ok_eq1 = True
    x = 1e-3
    for j in range(2, 51):
        ok_eq1 &= abs(eq1_expression(j, x) - 2 * (2 * j + 1)) <= 0.01 * 2 * (2 * j + 1)
    c.finish(ok_mu and ok_struve and ok_asymb and ok_eq1,
             f"mu0={m0:.8f}, struve/asymb/eq1-limit checks {ok_struve}/{ok_asymb}/{ok_eq1}")


def test_criterion_3_positivity_scans():
    c = Criterion(3, 300)
    rep_eq1, _, _, _ = eq1_scan()
    rep_lam, _, _, _ = lambda_scan()
    rep_amos, _, _, _ = turan_scan("amos_I")
    rep_tk, _, _, _ = turan_scan("turan_K")
    ok = rep_eq1.verdict and rep_lam.verdict and rep_amos.verdict and rep_tk.verdict
    c.finish(ok, f"eq1 min {rep_eq1.min_value:.3e} at {rep_eq1.argmin}; "
                 f"lambda min {rep_lam.min_value:.3e} at {rep_lam.argmin}; "
                 f"amos {rep_amos.min_value:.3e}; turan_K {rep_tk.min_value:.3e}")


def test_criterion_4_commutator_identity_and_positivity():
    c = Criterion(4, 120)
    rng = np.random.default_rng(101)
    worst_rel = 0.0
    for dim in (1, 2):
        w = LatticeWindow(dim=dim, radius=(10,) * dim)
        lam = 0.18
        ops = assemble(GaussianWeight(lam), w)
        for _ in range(50):
            f = inner_random(w, rng)
            a = commutator_form(ops, f)
            b = gaussian_closed_form(lam, f)
            worst_rel = max(worst_rel, abs(a - b) / max(abs(a), abs(b), 1e-300))
    ok_identity = worst_rel <= 1e-10
    ok_pos = True
    worst_neg = 0.0
    for spec in (InverseBesselWeight(0.1), BesselKWeight(0.125), GaussianWeight(0.05)):
        for dim in (1, 2):
            w = LatticeWindow(dim=dim, radius=(10,) * dim)
            ops = assemble(spec, w)
            for _ in range(250):
                f = inner_random(w, rng)
                val = commutator_form(ops, f)
                worst_neg = min(worst_neg, val / f.norm() ** 2)
                ok_pos &= val >= -1e-10 * f.norm() ** 2
    c.finish(ok_identity and ok_pos,
             f"identity worst rel {worst_rel:.2e}; most negative normalized form {worst_neg:.2e}")


def test_criterion_5_evolution_exactness():
    c = Criterion(5, 120)
    rng = np.random.default_rng(202)
    worst_cross = 0.0
    worst_unit = 0.0
    cases = [(1, 60)] * 20 + [(2, 56)] * 10
    for dim, radius in cases:
        w = LatticeWindow(dim=dim, radius=(radius,) * dim)
        f = compact_random(w, rng)
        t = float(rng.choice([0.25, 0.5, 1.0]))
        spec = evolve_free_spectral(f, t, EvolutionConfig.for_time(t))
        conv = evolve_free_convolution(f, t, EvolutionConfig.for_time(t, method="convolution"))
        worst_cross = max(worst_cross, float(np.linalg.norm(spec.values - conv.values)) / f.norm())
        worst_unit = max(worst_unit, abs(spec.norm() - f.norm()) / f.norm())
    w = LatticeWindow(dim=1, radius=(24,))
    f = compact_random(w, rng)
    V = Potential.random_bounded(w, sup=2.0, seed=303)
    outs = {}
    for dt in (4e-3, 2e-3, 1e-3):
        cfg = EvolutionConfig.for_time(1.0, method="split_step", dt=dt)
        outs[dt] = evolve_potential(f, V, 0.0, 1.0, cfg).values
    ratio = np.linalg.norm(outs[4e-3] - outs[2e-3]) / np.linalg.norm(outs[2e-3] - outs[1e-3])
    ok = worst_cross <= 1e-10 and worst_unit <= 1e-13 and 3.5 <= ratio <= 4.5
    c.finish(ok, f"cross {worst_cross:.2e}, unitarity {worst_unit:.2e}, richardson {ratio:.3f}")


def _convexity_case(f0, spec, inner, V=None):
    series = sample_series(f0, spec, np.linspace(0, 1, 21), SPLIT_CFG, V=V, inner_radius=inner)
    return convexity_report(series, tol=1e-8)


def test_criterion_6_log_convexity_matrix():
    c = Criterion(6, 600)
    rng = np.random.default_rng(404)
    results = {}

    # (a) inverse_bessel lam = 0.1; delta and random compact data; d = 1, 2
    spec_a = InverseBesselWeight(0.1)
    w = LatticeWindow(dim=1, radius=(26,))
    results["a_d1_delta"] = _convexity_case(Field.delta(w), spec_a, 22)
    w = LatticeWindow(dim=1, radius=(28,))
    results["a_d1_random"] = _convexity_case(compact_random(w, rng), spec_a, 24)
    w2 = LatticeWindow(dim=2, radius=(22, 22))
    results["a_d2_delta"] = _convexity_case(Field.delta(w2), spec_a, 20)
    w2 = LatticeWindow(dim=2, radius=(24, 24))
    results["a_d2_random"] = _convexity_case(compact_random(w2, rng, half=1), spec_a, 21)

    # (b) bessel_k weight with K-enveloped data (I_j(1/2) decays below 1/K_j(4))
    spec_b = BesselKWeight(0.125)
    w = LatticeWindow(dim=1, radius=(26,))
    table = log_bessel_i_all(0.5, 26)
    logs = table[np.abs(w.axes()[0])] - table[0]
    vals = np.where(logs > -90.0, np.exp(np.maximum(logs, -90.0)), 0.0)
    f_b = Field(w, vals.astype(complex))
    results["b_besselk"] = _convexity_case(f_b, spec_b, 22)

    # (c) gaussian lam = 0.05 with certified tails
    spec_c = GaussianWeight(0.05)
    w = LatticeWindow(dim=1, radius=(19,))
    f_c = Field.from_profile(w, lambda j: np.exp(-0.5 * j.astype(float) ** 2))
    results["c_gaussian"] = _convexity_case(f_c, spec_c, 17)

    # (d) each of (a)-(c) with a random bounded potential, split-step dt = 1e-3
    w = LatticeWindow(dim=1, radius=(26,))
    V = Potential.random_bounded(w, sup=2.0, seed=505)
    results["d_invbessel_V"] = _convexity_case(Field.delta(w), spec_a, 22, V=V)
    w = LatticeWindow(dim=1, radius=(28,))
    V = Potential.random_bounded(w, sup=2.0, seed=506)
    results["d_invbessel_random_V"] = _convexity_case(compact_random(w, rng), spec_a, 24, V=V)
    w = LatticeWindow(dim=1, radius=(26,))
    V = Potential.random_bounded(w, sup=2.0, seed=507)
    results["d_besselk_V"] = _convexity_case(f_b, spec_b, 22, V=V)
    w = LatticeWindow(dim=1, radius=(19,))
    V = Potential.random_bounded(w, sup=2.0, seed=508)
    results["d_gaussian_V"] = _convexity_case(f_c, spec_c, 17, V=V)

    ok = all(rep.verdict for rep in results.values())
    detail = "; ".join(f"{k}:{'T' if rep.verdict else 'F'}(min2nd {rep.min_second_difference:.1e})"
                       for k, rep in results.items())
    c.finish(ok, detail)


def test_criterion_7_apriori_estimates():
    c = Criterion(7, 120)
    lam = 0.05
    base = apriori_estimates(Field.delta(LatticeWindow(dim=1, radius=(24,))), lam,
                             np.linspace(0, 1, 21), inner_radius=20)
    fine = apriori_estimates(Field.delta(LatticeWindow(dim=1, radius=(24,))), lam,
                             np.linspace(0, 1, 41), inner_radius=20)
    wide = apriori_estimates(Field.delta(LatticeWindow(dim=1, radius=(48,))), lam,
                             np.linspace(0, 1, 21), inner_radius=20)
    ok = (np.isfinite(base.fitted_c) and base.fitted_c > 0
          and abs(fine.fitted_c - base.fitted_c) <= 0.2 * base.fitted_c
          and abs(wide.fitted_c - base.fitted_c) <= 0.2 * base.fitted_c)
    c.finish(ok, f"fitted_c = {base.fitted_c:.6f} (t-refined {fine.fitted_c:.6f}, "
                 f"window-doubled {wide.fitted_c:.6f})")


def test_criterion_8_carleman_suite():
    c = Criterion(8, 600)
    ok_verify = True
    worst_ratio = 0.0
    for mu in (0.6, 1.0):
        for eps in (0.05, 0.1):
            for r in (50.0, 100.0, 200.0):
                p = CarlemanParams(mu=mu, eps=eps, big_r=r)
                for width, osc in ((4, 0.0), (10, 0.0), (6, 0.5)):
                    w = LatticeWindow(dim=1, radius=(width + 2,))
                    g = bump_test_function(w, width, oscillation=osc,
                                           n_times=recommended_time_nodes(p, width))
                    rep = verify_carleman(g, p)
                    ok_verify &= rep.verdict
                    worst_ratio = max(worst_ratio, rep.ratio)
    ok_quad = True
    worst_quad = math.inf
    for mu in (0.6, 1.0):
        for eps in (0.05, 0.1):
            for r in (50.0, 100.0, 200.0):
                p = CarlemanParams(mu=mu, eps=eps, big_r=r)
                w = LatticeWindow(dim=1, radius=(int(r / 4) + 150,))
                for t in np.linspace(0.05, 0.95, 19):
                    q = eqc_quadratic_form(p, float(t), w)
                    ok_quad &= q.min_rayleigh >= -1e-8 * q.target
                    worst_quad = min(worst_quad, q.min_rayleigh / q.target)

    # cutoff residual identity and the M^-2 decay of the spatial boundary term
    wcut = LatticeWindow(dim=1, radius=(40,))
    f0 = Field.from_profile(wcut, lambda j: np.exp(-0.8 * j.astype(float) ** 2))
    times = np.linspace(0, 1, 161)
    vals = np.empty((times.size,) + wcut.shape, dtype=complex)
    dvals = np.empty_like(vals)
    for i, t in enumerate(times):
        ut = free_evolution_exact(f0, float(t))
        vals[i] = ut.values
        dvals[i] = 1j * laplacian(ut).values
    u = SpaceTimeField(wcut, tuple(times), vals, dvals)
    res = build_cutoffs(u, m=12, r_cut=4.0)
    ok_cut = res.mismatch <= 1e-8

    lam, eps_s, mu_s = 0.6, 0.01, 0.55
    p_s = CarlemanParams(mu=mu_s, eps=eps_s, big_r=50.0)
    wbig = LatticeWindow(dim=1, radius=(170,))
    fbig = Field.from_profile(wbig, lambda j: np.exp(-0.8 * j.astype(float) ** 2))
    logs = []
    for m in (20, 40, 80):
        terms = cutoff_boundary_terms(fbig, m, p_s, lam, n_times=121)
        logs.append(terms["term_theta_log"])
    slopes = [(logs[i + 1] - logs[i]) / math.log(2.0) for i in range(2)]
    ok_slope = all(-2.6 <= s <= -1.4 for s in slopes)

    ok = ok_verify and ok_quad and ok_cut and ok_slope
    c.finish(ok, f"verify worst ratio {worst_ratio:.3e}; quadform worst {worst_quad:.3e}x target; "
                 f"cutoff mismatch {res.mismatch:.1e}; M-slopes {[f'{s:.2f}' for s in slopes]}")


def test_criterion_9_hardy_threshold():
    c = Criterion(9, 120)
    ok = True
    details = []
    for a in (0.25, 0.5, 1.0):
        res = hardy_experiment(a, radius=120)
        ok &= res["alpha_plus_beta"] >= 2.0 - 0.05
        details.append(f"a={a}: alpha+beta*={res['alpha_plus_beta']:.4f}")
    c.finish(ok, "; ".join(details))
