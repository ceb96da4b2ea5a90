"""Weighted-norm series along evolutions, log-convexity verdicts, a-priori estimates.

The certified-norm path: free flows are sampled through the exact Bessel-kernel
sums (relative precision at any amplitude), potential flows through the
stencil split-step.  Every sampled time carries a tail certificate -- the
weighted mass outside the inner radius must stay below 1e-12 of the total,
otherwise the window cannot stand in for the infinite lattice and the sample
is refused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .evolve import EvolutionConfig, Potential, evolve_potential, free_evolution_exact, free_evolution_log_abs
from .lattice import Field
from .weights import WeightSpec, log_weight_array

TAIL_TOLERANCE = 1e-12
DEFAULT_TOL = 1e-8


class TailCertificateError(RuntimeError):
    """Window too small: weighted tail mass exceeds the certificate tolerance."""


class NonUniformGridError(ValueError):
    pass


@dataclass(frozen=True)
class NormSeries:
    """log F(t_i) with per-time tail certificates (tail mass / total)."""

    times: tuple[float, ...]
    log_values: tuple[float, ...]
    spec: WeightSpec
    tail_certificates: tuple[float, ...]
    inner_radius: int

    def __post_init__(self):
        t = np.asarray(self.times)
        if t.size < 1 or np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")


@dataclass(frozen=True)
class ConvexityReport:
    min_second_difference: float
    max_interp_slack: float
    verdict: bool
    tol: float
    scale: float


def _outside_mask(window, inner_radius: int) -> np.ndarray:
    grids = window.coordinate_grids()
    return np.maximum.reduce([np.abs(g) for g in grids]) > inner_radius


def _series_point(log_dens: np.ndarray, mask: np.ndarray) -> tuple[float, float]:
    total = float(logsumexp(log_dens))
    if total == -math.inf:
        return -math.inf, 0.0
    tail = float(logsumexp(np.where(mask, log_dens, -np.inf)))
    return total, math.exp(tail - total)


def sample_series(f0: Field, spec: WeightSpec, t_grid, engine: EvolutionConfig,
                  V: Potential | None = None, inner_radius: int | None = None,
                  check_certificates: bool = True) -> NormSeries:
    """Sample F(t) = sum_j w_j^2 |u_j(t)|^2 on a time grid.

    Free case (V None): exact kernel sums.  Potential case: independent
    split-step runs from t=0 to each grid point.  Raises
    :class:`TailCertificateError` when any grid time fails the 1e-12 tail
    certificate.
    """
    t_grid = [float(t) for t in t_grid]
    if inner_radius is None:
        inner_radius = min(f0.window.radius) - 3
    if inner_radius < 1 or inner_radius >= min(f0.window.radius):
        raise ValueError("inner_radius must be in [1, window radius)")
    logw = log_weight_array(spec, f0.window)
    mask = _outside_mask(f0.window, inner_radius)
    log_values, tails = [], []
    for t in t_grid:
        if V is None:
            log_abs = free_evolution_log_abs(f0, t)
        else:
            ut = f0 if t == 0.0 else evolve_potential(f0, V, 0.0, t, engine)
            with np.errstate(divide="ignore"):
                log_abs = np.log(np.abs(ut.values))
        log_dens = 2.0 * logw + 2.0 * log_abs
        total, tail_ratio = _series_point(log_dens, mask)
        if check_certificates and tail_ratio > TAIL_TOLERANCE:
            raise TailCertificateError(
                f"tail mass ratio {tail_ratio:.3e} at t={t} exceeds {TAIL_TOLERANCE} "
                f"(window {f0.window.radius}, inner {inner_radius})")
        log_values.append(total)
        tails.append(tail_ratio)
    return NormSeries(times=tuple(t_grid), log_values=tuple(log_values), spec=spec,
                      tail_certificates=tuple(tails), inner_radius=inner_radius)


def convexity_report(series: NormSeries, tol: float = DEFAULT_TOL) -> ConvexityReport:
    """Certify log-convexity from the sampled series.

    Checks the discrete second differences of log F on the uniform grid and
    the endpoint interpolation bound
    log F(t) <= (1-t) log F(0) + t log F(1) + tol; both tolerances are scaled
    by max(1, |log F|_inf) to absorb double-precision evolution error.
    """
    t = np.asarray(series.times)
    L = np.asarray(series.log_values)
    if t.size < 3:
        raise NonUniformGridError("need at least 3 grid points")
    h = np.diff(t)
    if np.max(np.abs(h - h[0])) > 1e-9 * h[0]:
        raise NonUniformGridError("grid must be uniform")
    finite = np.isfinite(L)
    if not finite.any():
        # zero field: -inf sentinel everywhere, trivially convex
        return ConvexityReport(0.0, 0.0, True, tol, 1.0)
    if not finite.all():
        raise ValueError("mixed finite/-inf series cannot be certified")
    scale = max(1.0, float(np.max(np.abs(L))))
    d2 = L[2:] - 2.0 * L[1:-1] + L[:-2]
    tau = (t - t[0]) / (t[-1] - t[0])
    slack = L - ((1.0 - tau) * L[0] + tau * L[-1])
    min_d2 = float(d2.min())
    max_slack = float(slack[1:-1].max()) if t.size > 2 else 0.0
    verdict = bool(min_d2 >= -tol * scale and max_slack <= tol * scale)
    return ConvexityReport(min_d2, max_slack, verdict, tol, scale)


# ----------------------------------------------------------------------------
# a-priori estimates for the e^{lam |j|^2} weight
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class AprioriEstimates:
    """Trapezoid values of the interior and gradient estimates against G(0)+G(1)."""

    lhs1: float
    lhs2: float
    rhs: float
    fitted_c: float


def apriori_estimates(f0: Field, lam: float, t_grid, inner_radius: int | None = None) -> AprioriEstimates:
    """Free-evolution quantities

      lhs1 = int t(1-t) sum_{j,k} (cosh(4 lam j_k)-1) e^{2 lam |j|^2} |u_j|^2 dt
      lhs2 = int t(1-t) sum_{j,k} e^{2 lam |j|^2} |u_{j+e_k}-u_{j-e_k}|^2 dt
      rhs  = G(0) + G(1),   fitted_c = max(lhs1, lhs2) / rhs

    computed by the trapezoid rule on the given grid.  Tail certificates are
    enforced on the lhs1 integrand (its summand dominates the gradient one).
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    window = f0.window
    if inner_radius is None:
        inner_radius = min(window.radius) - 3
    grids = window.coordinate_grids()
    w2 = np.exp(2.0 * lam * sum(g.astype(float) ** 2 for g in grids))
    coshterm = sum(np.cosh(4.0 * lam * g.astype(float)) - 1.0 for g in grids)
    mask = _outside_mask(window, inner_radius)

    t_grid = np.asarray([float(t) for t in t_grid])
    vals1 = np.empty(t_grid.size)
    vals2 = np.empty(t_grid.size)
    g_ends = {}
    for i, t in enumerate(t_grid):
        ut = free_evolution_exact(f0, t)
        dens = w2 * np.abs(ut.values) ** 2
        summand1 = coshterm * dens
        total1 = float(summand1.sum())
        if total1 > 0 and float(summand1[mask].sum()) > TAIL_TOLERANCE * total1:
            raise TailCertificateError(f"apriori lhs1 tail certificate failed at t={t}")
        if not np.isfinite(total1):
            raise TailCertificateError(f"divergent interior sum at t={t}")
        grad = np.zeros(window.shape)
        for ax in range(window.dim):
            fwd = np.zeros(window.shape, dtype=complex)
            bwd = np.zeros(window.shape, dtype=complex)
            src = [slice(None)] * window.dim
            dst = [slice(None)] * window.dim
            src[ax] = slice(1, None)
            dst[ax] = slice(None, -1)
            fwd[tuple(dst)] = ut.values[tuple(src)]
            bwd[tuple(src)] = ut.values[tuple(dst)]
            grad += np.abs(fwd - bwd) ** 2
        vals1[i] = t * (1.0 - t) * total1
        vals2[i] = t * (1.0 - t) * float((w2 * grad).sum())
        if t in (t_grid[0], t_grid[-1]):
            g_ends[t] = float(dens.sum())
    lhs1 = float(np.trapezoid(vals1, t_grid))
    lhs2 = float(np.trapezoid(vals2, t_grid))
    rhs = g_ends[t_grid[0]] + g_ends[t_grid[-1]]
    fitted = max(lhs1, lhs2) / rhs if rhs > 0 else 0.0   # zero field: all sums vanish
    return AprioriEstimates(lhs1, lhs2, rhs, fitted)


# ----------------------------------------------------------------------------
# linear-weight stability under bounded potentials
# ----------------------------------------------------------------------------

def linear_stability_constant(f0: Field, V: Potential, betas, t_grid,
                              engine: EvolutionConfig) -> dict:
    """Empirical constant C0 in sup_t X(t) <= e^{C0 ||V||} (X(0)+X(1)),
    X(t) = sum_j e^{2 beta j_1} |u_j(t)|^2, maximized over the given betas.

    The constant is recorded, not asserted against any specific value (it is
    never made explicit analytically).
    """
    from .weights import LinearWeight

    t_grid = [float(t) for t in t_grid]
    fields = {t: (f0 if t == 0.0 else evolve_potential(f0, V, 0.0, t, engine)) for t in t_grid}
    out = {"betas": list(betas), "ratios": [], "C0": 0.0}
    c0 = 0.0
    for beta in betas:
        spec = LinearWeight(beta=(beta,) + (0.0,) * (f0.window.dim - 1))
        logw = log_weight_array(spec, f0.window)
        logs = {}
        for t, ut in fields.items():
            with np.errstate(divide="ignore"):
                dens = 2.0 * logw + 2.0 * np.log(np.abs(ut.values))
            logs[t] = float(logsumexp(dens))
        sup = max(logs.values())
        ends = float(np.logaddexp(logs[t_grid[0]], logs[t_grid[-1]]))
        ratio = math.exp(sup - ends)
        out["ratios"].append(ratio)
        if V.sup_norm > 0 and ratio > 1.0:
            c0 = max(c0, math.log(ratio) / V.sup_norm)
    out["C0"] = c0
    return out
