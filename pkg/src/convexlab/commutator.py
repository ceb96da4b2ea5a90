"""Conjugated S/A operators, commutator quadratic forms, and positivity scans.

The generator conjugated by a weight w is B = w (i Lap) w^{-1}; S = (B+B*)/2
is symmetric, A = (B-B*)/2 skew-Hermitian, and log-convexity of the weighted
norm rides on <[S,A]f, f> >= 0.  Matrix entries are built from neighbor
log-weight differences (never bare weights), so arbitrarily steep weights
assemble without overflow.

Scalar expression scans (the I-ratio inequality behind the inverse-minimizer
weight and the K-ratio coefficient behind the bessel_k weight) are evaluated
as combinations of sinh/expm1 of log-Bessel differences.  Where double
precision provably cannot resolve the sign (large x, small order: the value
sits below the cancellation floor of the log tables), flagged points are
re-evaluated with mpmath through the uniform asymptotic brackets.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .lattice import Field, LatticeWindow
from .specfun import (
    log_bessel_i_ratio_grid,
    log_bessel_k_ratio_grid,
)
from .weights import WeightSpec, log_weight_array

_EPS_FLOOR = 4e-16
_FLAG_FACTOR = 50.0


def _sym_ratio(logr: np.ndarray, n) -> np.ndarray:
    """log(F_{n+1}/F_n) for any integer n, F symmetric in the order (F_{-m} = F_m).

    For n < 0 the symmetry gives log(F_{n+1}/F_n) = -log(F_{|n|}/F_{|n|-1})
    = -logr[-n-1].
    """
    n = np.asarray(n)
    idx = np.where(n >= 0, n, -n - 1)
    sign = np.where(n >= 0, 1.0, -1.0)
    return sign[..., None] * logr[idx] if logr.ndim == 2 else sign * logr[idx]


# ----------------------------------------------------------------------------
# operator assembly
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ConjugatedOperators:
    weight: WeightSpec
    window: LatticeWindow
    S: sp.csr_matrix = field(repr=False)
    A: sp.csr_matrix = field(repr=False)


def assemble(spec: WeightSpec, window: LatticeWindow) -> ConjugatedOperators:
    """Build S and A for B = w (i Lap) w^{-1} from neighbor log-weight ratios.

    Off-diagonal entries: B[j, j+e_k] = i e^{log w_j - log w_{j+e_k}}; the
    symmetric/skew split gives S[j, j+e_k] = (i/2)(rho - 1/rho) and
    A[j, j+e_k] = (i/2)(rho + 1/rho) with rho the weight ratio; A carries the
    -2di diagonal.  Hermitian symmetry is exact by construction.
    """
    logw = log_weight_array(spec, window)
    if not np.all(np.isfinite(logw)):
        raise OverflowError("weight log-values not finite on window")
    n = window.site_count
    idx = np.arange(n).reshape(window.shape)
    rows_s, cols_s, vals_s = [], [], []
    rows_a, cols_a, vals_a = [], [], []
    for ax in range(window.dim):
        src = [slice(None)] * window.dim
        dst = [slice(None)] * window.dim
        src[ax] = slice(None, -1)   # j
        dst[ax] = slice(1, None)    # j + e_k
        a = idx[tuple(src)].ravel()
        b = idx[tuple(dst)].ravel()
        dlog = (logw[tuple(src)] - logw[tuple(dst)]).ravel()  # log(w_j / w_{j+e})
        if np.max(np.abs(dlog)) > 700.0:
            raise OverflowError("neighbor weight ratio exceeds double range")
        rho = np.exp(dlog)
        s_val = 0.5j * (rho - 1.0 / rho)
        a_val = 0.5j * (rho + 1.0 / rho)
        # from B[a,b] = i rho, B[b,a] = i/rho: S Hermitian, A skew-Hermitian
        rows_s += [a, b]
        cols_s += [b, a]
        vals_s += [s_val, -s_val]
        rows_a += [a, b]
        cols_a += [b, a]
        vals_a += [a_val, a_val]
    rows_a.append(np.arange(n))
    cols_a.append(np.arange(n))
    vals_a.append(np.full(n, -2j * window.dim))
    S = sp.csr_matrix((np.concatenate(vals_s), (np.concatenate(rows_s), np.concatenate(cols_s))), shape=(n, n))
    A = sp.csr_matrix((np.concatenate(vals_a), (np.concatenate(rows_a), np.concatenate(cols_a))), shape=(n, n))
    return ConjugatedOperators(weight=spec, window=window, S=S, A=A)


def commutator_form(ops: ConjugatedOperators, f: Field) -> float:
    """<(SA - AS) f, f>; the imaginary residue must be below 1e-12 ||f||^2."""
    if f.window != ops.window:
        raise ValueError("field window does not match operators")
    margin = min(f.window.radius) - f.support_radius()
    if f.support_radius() >= 0 and margin < 2:
        raise ValueError("support too close to boundary for an exact commutator form")
    v = f.values.ravel()
    y = ops.S @ (ops.A @ v) - ops.A @ (ops.S @ v)
    val = np.sum(y * np.conj(v))
    nsq = float(np.vdot(v, v).real)
    if abs(val.imag) > 1e-12 * max(nsq, 1e-300):
        raise ArithmeticError(f"commutator form has imaginary residue {val.imag:.3e}")
    return float(val.real)


def gaussian_closed_form(lam: float, f: Field) -> float:
    """sinh(2 lam) sum |f_{j+e_k}-f_{j-e_k}|^2 + 2 sinh(2 lam) sum (cosh(4 lam j_k)-1)|f_j|^2."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    window = f.window
    grids = window.coordinate_grids()
    total_grad = 0.0
    for ax in range(window.dim):
        fwd = np.zeros(window.shape, dtype=complex)
        bwd = np.zeros(window.shape, dtype=complex)
        src = [slice(None)] * window.dim
        dst = [slice(None)] * window.dim
        src[ax] = slice(1, None)
        dst[ax] = slice(None, -1)
        fwd[tuple(dst)] = f.values[tuple(src)]
        bwd[tuple(src)] = f.values[tuple(dst)]
        total_grad += float(np.sum(np.abs(fwd - bwd) ** 2))
    total_site = 0.0
    dens = np.abs(f.values) ** 2
    for g in grids:
        total_site += float(np.sum((np.cosh(4.0 * lam * g.astype(float)) - 1.0) * dens))
    return math.sinh(2.0 * lam) * total_grad + 2.0 * math.sinh(2.0 * lam) * total_site


# ----------------------------------------------------------------------------
# scalar positivity expressions (I-ratio and K-ratio coefficients)
# ----------------------------------------------------------------------------

def _eq1_terms(logr, j: int):
    """(log rho, log tau_plus, log tau_minus) from consecutive-ratio logs.

    With logr[n] = log(I_{n+1}/I_n):
      log rho   = log(I_{j+1} I_{j-1} / I_j^2)   = logr[j]   - logr[j-1]
      log tau+  = log(I_{j+2} I_j / I_{j+1}^2)   = logr[j+1] - logr[j]
      log tau-  = log(I_{j-2} I_j / I_{j-1}^2)   = logr[j-1] - logr[j-2]
    (ratios carry ~1e-16 relative error, far tighter than table differences).
    """
    def r(n):
        return logr[n] if n >= 0 else -logr[-n - 1]
    lrho = r(j) - r(j - 1)
    ltp = r(j + 1) - r(j)
    ltm = r(j - 1) - r(j - 2)
    return lrho, ltp, ltm


def _eq1_value_err(j: int, x: float, logr) -> tuple[float, float]:
    lrho, ltp, ltm = _eq1_terms(logr, j)
    value = (2.0 * j * j * math.expm1(-2.0 * lrho)
             + x * x * (-2.0 * math.sinh(lrho) + math.sinh(ltp) + math.sinh(ltm)))
    err_l = _EPS_FLOOR * (abs(float(logr[min(j + 1, len(logr) - 1)])) + 1.0)
    amp = math.exp(min(2.0 * abs(lrho), 60.0))
    cosh_amp = math.cosh(min(max(abs(lrho), abs(ltp), abs(ltm)), 60.0))
    err = 4.0 * err_l * (2.0 * j * j * amp + x * x * cosh_amp * 3.0)
    return value, err


def _mp_bracket_i(nu: int, x, mp, nterms: int = 60):
    """Uniform asymptotic bracket of I_nu: I_nu ~ e^x/sqrt(2 pi x) * B(nu, x)."""
    acc = mp.mpf(1)
    term = mp.mpf(1)
    f4 = mp.mpf(4) * nu * nu
    for k in range(1, nterms):
        term = term * -(f4 - (2 * k - 1) ** 2) / (8 * k * x)
        acc += term
        if abs(term) < mp.mpf(10) ** (-mp.mp.dps - 2):
            break
    return acc


def _mp_bracket_k(nu: int, x, mp, nterms: int = 60):
    """Asymptotic bracket of K_nu: K_nu ~ sqrt(pi/2x) e^{-x} * B(nu, x)."""
    acc = mp.mpf(1)
    term = mp.mpf(1)
    f4 = mp.mpf(4) * nu * nu
    for k in range(1, nterms):
        term = term * (f4 - (2 * k - 1) ** 2) / (8 * k * x)
        acc += term
        if abs(term) < mp.mpf(10) ** (-mp.mp.dps - 2):
            break
    return acc


def _eq1_mp(j: int, x: float) -> float:
    import mpmath as mp

    with mp.workdps(45):
        xx = mp.mpf(x)
        if x >= max(2.0 * j * j + 50.0, 500.0):
            def B(n):
                return _mp_bracket_i(abs(n), xx, mp)
        else:
            def B(n):
                return mp.besseli(abs(n), xx)
        bj, bp, bm, bp2, bm2 = B(j), B(j + 1), B(j - 1), B(j + 2), B(j - 2)
        rho = bp * bm / bj**2
        tp = bp2 * bj / bp**2
        tm = bm2 * bj / bm**2
        val = (2 * j * j * (1 / rho**2 - 1)
               + xx * xx * (1 / rho - rho + (tp - 1 / tp) / 2 + (tm - 1 / tm) / 2))
        return float(val)


def eq1_expression(j: int, x: float) -> float:
    """The I-ratio positivity expression 2j^2(I_j^4/(I_{j+1}^2 I_{j-1}^2) - 1) + x^2 (...).

    Hybrid evaluation: ratio-log differences in double, mpmath re-evaluation
    when the double value sits below its cancellation floor.
    """
    if j < 0:
        raise ValueError("j must be >= 0")
    if x <= 0:
        raise ValueError("x must be > 0")
    logr = log_bessel_i_ratio_grid(np.array([x]), j + 2)[:, 0]
    value, err = _eq1_value_err(j, x, logr)
    if abs(value) < _FLAG_FACTOR * err:
        return _eq1_mp(j, x)
    return value


def _lambda_terms(logr, j: int):
    """sinh arguments of the seven-term coefficient from K-ratio logs.

    With logr[n] = log(K_{n+1}/K_n) (K symmetric in the order):
      a1 = 2 log(K_{j+1}/K_j)      a2 = 2 log(K_{j-1}/K_j)
      a3 = log(K_{j+1}^2/(K_j K_{j+2}))   a4 = log(K_{j-1}^2/(K_j K_{j-2}))
    """
    def r(n):
        return logr[n] if n >= 0 else -logr[-n - 1]
    a1 = 2.0 * r(j)
    a2 = -2.0 * r(j - 1)
    a3 = r(j) - r(j + 1)
    a4 = r(j - 2) - r(j - 1)
    return a1, a2, a3, a4


def _lambda_value_err(j: int, x: float, logr) -> tuple[float, float]:
    a1, a2, a3, a4 = _lambda_terms(logr, j)
    value = math.sinh(a1) + math.sinh(a2) + math.sinh(a3) + math.sinh(a4)
    err_l = _EPS_FLOOR * (abs(float(logr[min(j + 1, len(logr) - 1)])) + 1.0)
    cosh_amp = math.cosh(min(max(abs(a1), abs(a2), abs(a3), abs(a4)), 60.0))
    return value, 6.0 * err_l * cosh_amp * 4.0


def _lambda_mp(j: int, x: float) -> float:
    import mpmath as mp

    with mp.workdps(45):
        xx = mp.mpf(x)
        if x >= max(2.0 * j * j + 50.0, 500.0):
            def K(n):
                return _mp_bracket_k(abs(n), xx, mp)
        else:
            def K(n):
                return mp.besselk(abs(n), xx)
        kj, kp, km, kp2, km2 = K(j), K(j + 1), K(j - 1), K(j + 2), K(j - 2)
        val = ((kp**2 + km**2) / (2 * kj**2) - kj**2 / (2 * km**2) - kj**2 / (2 * kp**2)
               + kp**2 / (2 * kj * kp2) - kp2 * kj / (2 * kp**2)
               + km**2 / (2 * kj * km2) - km2 * kj / (2 * km**2))
        return float(val)


def lambda_j(j: int, x: float, check_identity: bool = True) -> float:
    """Seven-term K-ratio coefficient of the bessel_k-weight commutator.

    For j >= 2 also verifies the recurrence form
    x^2 Lambda_j = 2j^2 - 2j^2 K_j^4/(K_{j-1}^2 K_{j+1}^2) + x^2 (...)
    to 1e-9 relative (above the double cancellation floor).
    """
    if j < 0:
        raise ValueError("j must be >= 0")
    if x <= 0:
        raise ValueError("x must be > 0")
    logr = log_bessel_k_ratio_grid(np.array([x]), j + 2)[:, 0]
    value, err = _lambda_value_err(j, x, logr)
    if abs(value) < _FLAG_FACTOR * err:
        return _lambda_mp(j, x)
    if check_identity and j >= 2:
        lrho = float(logr[j] - logr[j - 1])        # positive: K-Turan
        _, _, a3, a4 = _lambda_terms(logr, j)
        recur = (-2.0 * j * j * math.expm1(-2.0 * lrho)
                 + x * x * (2.0 * math.sinh(lrho) + math.sinh(a3) + math.sinh(a4)))
        lhs = x * x * value
        floor = x * x * err * _FLAG_FACTOR + _EPS_FLOOR * j * j * 100.0
        if abs(lhs - recur) > 1e-9 * max(abs(lhs), abs(recur)) + floor:
            raise ArithmeticError(
                f"lambda_j recurrence identity violated at (j={j}, x={x}): {lhs} vs {recur}")
    return value


# ----------------------------------------------------------------------------
# grid scans
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PositivityScanReport:
    expression: str
    grid: dict
    min_value: float
    argmin: tuple
    verdict: bool
    refined: bool
    n_points: int
    n_flagged: int

    def to_json_dict(self) -> dict:
        return {
            "expression": self.expression,
            "grid": self.grid,
            "min_value": self.min_value,
            "argmin": list(self.argmin),
            "verdict": self.verdict,
            "refined": self.refined,
            "n_points": self.n_points,
            "n_flagged": self.n_flagged,
        }


def default_x_grid(xmin: float = 1e-2, xmax: float = 1e4, per_decade: int = 200,
                   extra: np.ndarray | None = None) -> np.ndarray:
    n = int(round((math.log10(xmax) - math.log10(xmin)) * per_decade)) + 1
    xs = np.logspace(math.log10(xmin), math.log10(xmax), n)
    if extra is not None:
        xs = np.unique(np.concatenate([xs, extra[(extra > 0) & (extra <= xmax)]]))
    return xs


def _case_boundary_x(j_max: int, xmax: float) -> np.ndarray:
    js = np.arange(1, j_max + 1, dtype=float)
    return np.concatenate([[1.1], 1.5 * js, js**1.5])


def _eq1_grid_values(js: np.ndarray, xs: np.ndarray):
    logr = log_bessel_i_ratio_grid(xs, int(js.max()) + 2)
    lrho = _sym_ratio(logr, js) - _sym_ratio(logr, js - 1)
    ltp = _sym_ratio(logr, js + 1) - _sym_ratio(logr, js)
    ltm = _sym_ratio(logr, js - 1) - _sym_ratio(logr, js - 2)
    X = xs[None, :]
    J2 = (js * js)[:, None].astype(float)
    vals = 2.0 * J2 * np.expm1(-2.0 * lrho) + X * X * (-2.0 * np.sinh(lrho) + np.sinh(ltp) + np.sinh(ltm))
    err_l = _EPS_FLOOR * (np.abs(_sym_ratio(logr, js)) + 1.0)
    amp = np.exp(np.minimum(2.0 * np.abs(lrho), 60.0))
    cosh_amp = np.cosh(np.minimum(np.maximum.reduce([np.abs(lrho), np.abs(ltp), np.abs(ltm)]), 60.0))
    errs = 4.0 * err_l * (2.0 * J2 * amp + X * X * cosh_amp * 3.0)
    return vals, errs


def _lambda_grid_values(js: np.ndarray, xs: np.ndarray):
    logr = log_bessel_k_ratio_grid(xs, int(js.max()) + 2)
    a1 = 2.0 * _sym_ratio(logr, js)
    a2 = -2.0 * _sym_ratio(logr, js - 1)
    a3 = _sym_ratio(logr, js) - _sym_ratio(logr, js + 1)
    a4 = _sym_ratio(logr, js - 2) - _sym_ratio(logr, js - 1)
    vals = np.sinh(a1) + np.sinh(a2) + np.sinh(a3) + np.sinh(a4)
    err_l = _EPS_FLOOR * (np.abs(_sym_ratio(logr, js)) + 1.0)
    cosh_amp = np.cosh(np.minimum(np.maximum.reduce([np.abs(a1), np.abs(a2), np.abs(a3), np.abs(a4)]), 60.0))
    errs = 24.0 * err_l * cosh_amp
    return vals, errs


def _refine_points(fn, points, threads: int = 1) -> list[float]:
    if threads > 1 and len(points) > 16:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, [p[0] for p in points], [p[1] for p in points], chunksize=16))
    return [fn(j, x) for j, x in points]


def _scan_expression(name: str, js: np.ndarray, xs: np.ndarray, grid_fn, point_fn,
                     threads: int = 1, negate: bool = False):
    vals, errs = grid_fn(js, xs)
    flagged = np.abs(vals) < _FLAG_FACTOR * errs
    pts = [(int(js[a]), float(xs[b])) for a, b in zip(*np.nonzero(flagged))]
    if pts:
        refined_vals = _refine_points(point_fn, pts, threads)
        vals[flagged] = refined_vals
    if negate:
        vals = -vals
    a, b = np.unravel_index(np.argmin(vals), vals.shape)
    min_value = float(vals[a, b])
    argmin = (int(js[a]), float(xs[b]))
    # local-scale adaptive refinement: a grid cannot prove an inequality, so a
    # suspiciously small minimum triggers a 10x finer x-sweep around the argmin
    neighborhood = vals[max(a - 1, 0):a + 2, max(b - 1, 0):b + 2]
    local_scale = float(np.max(np.abs(neighborhood)))
    refined = False
    if min_value < 1e-6 * local_scale:
        refined = True
        lo = xs[max(b - 1, 0)]
        hi = xs[min(b + 1, xs.size - 1)]
        fine = np.linspace(lo, hi, 21)
        for jj in {int(js[max(a - 1, 0)]), int(js[a]), int(js[min(a + 1, js.size - 1)])}:
            for xv in fine:
                v = point_fn(jj, float(xv))
                if negate:
                    v = -v
                if v < min_value:
                    min_value = float(v)
                    argmin = (jj, float(xv))
    return vals, min_value, argmin, refined, int(flagged.sum())


def eq1_scan(j_range: tuple[int, int] = (0, 300), xs: np.ndarray | None = None,
             threads: int = 1, negate: bool = False) -> tuple[PositivityScanReport, np.ndarray, np.ndarray, np.ndarray]:
    """Scan the I-ratio expression over the default grid (case boundaries included).

    Returns (report, js, xs, values).
    """
    js = np.arange(j_range[0], j_range[1] + 1)
    if xs is None:
        xs = default_x_grid(extra=_case_boundary_x(j_range[1], 1e4))
    vals, min_value, argmin, refined, n_flagged = _scan_expression(
        "eq1", js, xs, _eq1_grid_values, eq1_expression, threads, negate)
    name = "eq1_negated" if negate else "eq1"
    report = PositivityScanReport(
        expression=name,
        grid={"j": [int(js[0]), int(js[-1])], "x": [float(xs[0]), float(xs[-1])], "n_x": int(xs.size)},
        min_value=min_value, argmin=argmin, verdict=bool(min_value > 0.0),
        refined=refined, n_points=int(vals.size), n_flagged=n_flagged)
    return report, js, xs, vals


def _lambda_point(j: int, x: float) -> float:
    return lambda_j(j, x, check_identity=False)


def lambda_scan(j_range: tuple[int, int] = (0, 300), xs: np.ndarray | None = None,
                threads: int = 1) -> tuple[PositivityScanReport, np.ndarray, np.ndarray, np.ndarray]:
    """Scan the seven-term K-ratio coefficient over the default grid."""
    js = np.arange(j_range[0], j_range[1] + 1)
    if xs is None:
        xs = default_x_grid(extra=_case_boundary_x(j_range[1], 1e4))
    vals, min_value, argmin, refined, n_flagged = _scan_expression(
        "lambda_j", js, xs, _lambda_grid_values, _lambda_point, threads)
    report = PositivityScanReport(
        expression="lambda_j",
        grid={"j": [int(js[0]), int(js[-1])], "x": [float(xs[0]), float(xs[-1])], "n_x": int(xs.size)},
        min_value=min_value, argmin=argmin, verdict=bool(min_value > 0.0),
        refined=refined, n_points=int(vals.size), n_flagged=n_flagged)
    return report, js, xs, vals


def turan_scan(family: str, j_range: tuple[int, int] | None = None,
               xs: np.ndarray | None = None,
               threads: int = 1) -> tuple[PositivityScanReport, np.ndarray, np.ndarray, np.ndarray]:
    """Scan one of the Turan-type inequality families; the scan value is the
    log-domain margin of the inequality (positive iff it holds strictly).

    amos_I          2 log I_j - log I_{j+1} - log I_{j-1} > 0,  j >= -1
    turan_K         log K_{j+1} + log K_{j-1} - 2 log K_j > 0,  j >= 0
    baricz_I_bounds two-sided Turanian estimate on the region j >= 17, x <= j^{3/2}
    segura_K_bounds 1/(1+1/x) <= K_v^2/(K_{v-1}K_{v+1}) <= Segura upper, v >= 1
    """
    if family == "amos_I":
        lo, hi = j_range or (-1, 200)
        js = np.arange(lo, hi + 1)
        x = xs if xs is not None else default_x_grid(1e-3, 100.0, 40)
        logr = log_bessel_i_ratio_grid(x, int(np.abs(js).max()) + 1)
        vals = _sym_ratio(logr, js - 1) - _sym_ratio(logr, js)
    elif family == "turan_K":
        js = np.arange((j_range or (0, 200))[0], (j_range or (0, 200))[1] + 1)
        x = xs if xs is not None else default_x_grid(1e-3, 100.0, 40)
        logr = log_bessel_k_ratio_grid(x, int(js.max()) + 1)
        vals = _sym_ratio(logr, js) - _sym_ratio(logr, js - 1)
    elif family == "baricz_I_bounds":
        js = np.arange((j_range or (17, 150))[0], (j_range or (17, 150))[1] + 1)
        x = xs if xs is not None else default_x_grid(1e-3, 100.0, 40)
        logr = log_bessel_i_ratio_grid(x, int(js.max()) + 1)
        lrho = logr[js] - logr[js - 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            logT = np.log(-np.expm1(lrho))       # log(1 - I_{j+1}I_{j-1}/I_j^2)
        J = js[:, None].astype(float)
        X = x[None, :]
        log_lower = np.log(J + 0.5) - np.log(J + 1.0) - 0.5 * np.log(X**2 + (J + 0.5) ** 2)
        log_upper = -np.log(X + 2.0)
        margin = np.minimum(logT - log_lower, log_upper - logT)
        # the two-sided estimate fails for x large relative to j; scan only
        # the region x <= j^{3/2} where it is actually invoked
        vals = np.where(X <= J**1.5, margin, np.inf)
    elif family == "segura_K_bounds":
        js = np.arange((j_range or (1, 150))[0], (j_range or (1, 150))[1] + 1)
        x = xs if xs is not None else default_x_grid(1e-3, 100.0, 40)
        logr = log_bessel_k_ratio_grid(x, int(js.max()) + 1)
        g = logr[js] - logr[js - 1]                    # positive by K-Turan
        J = js[:, None].astype(float)
        X = x[None, :]
        margin_low = -g + np.log1p(1.0 / X)
        margin_up = g - np.log1p(1.0 / (J - 0.5 + np.sqrt(X**2 + (J - 0.5) ** 2)))
        vals = np.minimum(margin_low, margin_up)
        with np.errstate(invalid="ignore"):
            den = 1.0 + 1.0 / X - (J**2 - 0.25) / X**3
            baricz_up = np.where((X >= 1.5 * J) & (den > 0), g + np.log(den), np.inf)
        vals = np.minimum(vals, baricz_up)
    else:
        raise ValueError(f"unknown scan family {family!r}")
    finite = np.isfinite(vals)
    a, b = np.unravel_index(np.argmin(np.where(finite, vals, np.inf)), vals.shape)
    min_value = float(vals[a, b])
    report = PositivityScanReport(
        expression=family,
        grid={"j": [int(js[0]), int(js[-1])], "x": [float(x[0]), float(x[-1])], "n_x": int(x.size)},
        min_value=min_value,
        argmin=(int(js[a]), float(x[b])),
        verdict=bool(min_value > 0.0),
        refined=False,
        n_points=int(finite.sum()),
        n_flagged=0)
    return report, js, x, vals
