"""Weight families for the weighted l2 norms, evaluated entirely in log domain.

Families (single-power logs; the norm squares them):

  inverse_bessel  -log prod_k I_{j_k}(1/(2 lam))
  bessel_k        +log prod_k K_{j_k}(1/(2 lam))
  gaussian        lam |j|^2
  linear          beta . j
  carleman        mu |j + R t(1-t) e_1|^2 - (1+eps) R^2 t(1-t) / (16 mu)

Normalization constants are fixed to 1: rescaling a norm by a positive
constant never changes log-convexity, so they cancel in every verdict.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .lattice import Field, LatticeWindow
from .specfun import log_bessel_i_all, log_bessel_k_all

_LOG_HUGE = 709.0


@dataclass(frozen=True)
class InverseBesselWeight:
    """1 / prod_k I_{j_k}(1/(2 lam)) -- inverse of the discrete Gaussian minimizer."""
    lam: float
    family = "inverse_bessel_i"

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("inverse_bessel_i weight requires lam > 0")

    @property
    def bessel_arg(self) -> float:
        return 1.0 / (2.0 * self.lam)


@dataclass(frozen=True)
class BesselKWeight:
    """prod_k K_{j_k}(1/(2 lam)) -- adjoint-equation weight."""
    lam: float
    family = "bessel_k"

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("bessel_k weight requires lam > 0")

    @property
    def bessel_arg(self) -> float:
        return 1.0 / (2.0 * self.lam)


@dataclass(frozen=True)
class GaussianWeight:
    """exp(lam |j|^2)."""
    lam: float
    family = "gaussian"

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("gaussian weight requires lam > 0")


@dataclass(frozen=True)
class LinearWeight:
    """exp(beta . j); beta has one component per axis."""
    beta: tuple[float, ...]
    family = "linear"

    def __post_init__(self):
        beta = tuple(float(b) for b in (self.beta if np.iterable(self.beta) else (self.beta,)))
        object.__setattr__(self, "beta", beta)


@dataclass(frozen=True)
class CarlemanWeight:
    """exp(mu |j + R t(1-t) e_1|^2 - (1+eps) R^2 t(1-t)/(16 mu)) at a fixed time."""
    mu: float
    eps: float
    big_r: float
    t: float
    family = "carleman"

    def __post_init__(self):
        if self.mu <= 0 or self.eps <= 0 or self.big_r <= 0:
            raise ValueError("carleman weight requires mu, eps, R > 0")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError("carleman weight requires t in [0, 1]")


WeightSpec = InverseBesselWeight | BesselKWeight | GaussianWeight | LinearWeight | CarlemanWeight


def log_weight(spec: WeightSpec, site) -> float:
    """log of the single-power weight at one site (the norm squares the weight)."""
    site = tuple(int(s) for s in (site if np.iterable(site) else (site,)))
    if isinstance(spec, InverseBesselWeight):
        x = spec.bessel_arg
        return -sum(float(log_bessel_i_all(x, abs(j))[abs(j)]) for j in site)
    if isinstance(spec, BesselKWeight):
        x = spec.bessel_arg
        return sum(float(log_bessel_k_all(x, abs(j))[abs(j)]) for j in site)
    if isinstance(spec, GaussianWeight):
        return spec.lam * float(sum(j * j for j in site))
    if isinstance(spec, LinearWeight):
        if len(spec.beta) != len(site):
            raise ValueError("linear weight beta arity does not match site")
        return float(sum(b * j for b, j in zip(spec.beta, site)))
    if isinstance(spec, CarlemanWeight):
        tau = spec.big_r * spec.t * (1.0 - spec.t)
        shifted = (site[0] + tau,) + tuple(float(j) for j in site[1:])
        return spec.mu * sum(s * s for s in shifted) - (1.0 + spec.eps) * spec.big_r**2 * spec.t * (1.0 - spec.t) / (16.0 * spec.mu)
    raise TypeError(f"unknown weight spec {spec!r}")


def log_weight_array(spec: WeightSpec, window: LatticeWindow) -> np.ndarray:
    """log weight on every window site, built from per-axis log tables."""
    axes = window.axes()
    if isinstance(spec, (InverseBesselWeight, BesselKWeight)):
        x = spec.bessel_arg
        per_axis = []
        for ax in axes:
            nmax = int(np.max(np.abs(ax)))
            table = (log_bessel_i_all if isinstance(spec, InverseBesselWeight) else log_bessel_k_all)(x, nmax)
            vals = table[np.abs(ax)]
            per_axis.append(-vals if isinstance(spec, InverseBesselWeight) else vals)
        out = per_axis[0]
        for vals in per_axis[1:]:
            out = out[..., None] + vals
        return out
    grids = window.coordinate_grids()
    if isinstance(spec, GaussianWeight):
        return spec.lam * sum(g.astype(float) ** 2 for g in grids)
    if isinstance(spec, LinearWeight):
        if len(spec.beta) != window.dim:
            raise ValueError("linear weight beta arity does not match window dimension")
        return sum(b * g.astype(float) for b, g in zip(spec.beta, grids))
    if isinstance(spec, CarlemanWeight):
        tau = spec.big_r * spec.t * (1.0 - spec.t)
        q = (grids[0].astype(float) + tau) ** 2
        for g in grids[1:]:
            q = q + g.astype(float) ** 2
        return spec.mu * q - (1.0 + spec.eps) * spec.big_r**2 * spec.t * (1.0 - spec.t) / (16.0 * spec.mu)
    raise TypeError(f"unknown weight spec {spec!r}")


@dataclass(frozen=True)
class WeightedNormSq:
    """sum_j w_j^2 |f_j|^2 as an exact log plus the linear value when representable."""

    log_value: float
    value: float

    @classmethod
    def from_log(cls, log_value: float) -> "WeightedNormSq":
        if log_value == -math.inf:
            return cls(-math.inf, 0.0)
        return cls(log_value, math.exp(log_value) if log_value <= _LOG_HUGE else math.inf)


def log_density(log_w: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Per-site log of w_j^2 |f_j|^2, with exact -inf at zero amplitudes."""
    mags = np.abs(values)
    with np.errstate(divide="ignore"):
        return 2.0 * log_w + 2.0 * np.log(mags)


def weighted_norm_sq(f: Field, spec: WeightSpec) -> WeightedNormSq:
    """sum_j e^{2 log_weight(j)} |f_j|^2 by log-sum-exp (deterministic reduction)."""
    dens = log_density(log_weight_array(spec, f.window), f.values)
    return WeightedNormSq.from_log(float(logsumexp(dens)))


def _outside_mask(window: LatticeWindow, inner_radius: int) -> np.ndarray:
    grids = window.coordinate_grids()
    return np.maximum.reduce([np.abs(g) for g in grids]) > inner_radius


def tail_mass(f: Field, spec: WeightSpec, inner_radius: int) -> WeightedNormSq:
    """Weighted norm restricted to sites with max_k |j_k| > inner_radius."""
    if inner_radius >= min(f.window.radius):
        raise ValueError("inner_radius must be smaller than every window radius")
    dens = log_density(log_weight_array(spec, f.window), f.values)
    masked = np.where(_outside_mask(f.window, inner_radius), dens, -np.inf)
    return WeightedNormSq.from_log(float(logsumexp(masked)))


# ----------------------------------------------------------------------------
# JSON round-trip for CLI configs
# ----------------------------------------------------------------------------

def weight_to_json_dict(spec: WeightSpec) -> dict:
    if isinstance(spec, (InverseBesselWeight, BesselKWeight, GaussianWeight)):
        return {"family": spec.family, "lam": spec.lam}
    if isinstance(spec, LinearWeight):
        return {"family": spec.family, "beta": list(spec.beta)}
    if isinstance(spec, CarlemanWeight):
        return {"family": spec.family, "mu": spec.mu, "eps": spec.eps, "R": spec.big_r, "t": spec.t}
    raise TypeError(f"unknown weight spec {spec!r}")


def weight_from_json_dict(d: dict) -> WeightSpec:
    family = d["family"]
    if family == "inverse_bessel_i":
        return InverseBesselWeight(lam=float(d["lam"]))
    if family == "bessel_k":
        return BesselKWeight(lam=float(d["lam"]))
    if family == "gaussian":
        return GaussianWeight(lam=float(d["lam"]))
    if family == "linear":
        return LinearWeight(beta=tuple(d["beta"]))
    if family == "carleman":
        return CarlemanWeight(mu=float(d["mu"]), eps=float(d["eps"]), big_r=float(d["R"]), t=float(d["t"]))
    raise ValueError(f"unknown weight family {family!r}")


def weight_to_json(spec: WeightSpec) -> str:
    return json.dumps(weight_to_json_dict(spec), sort_keys=True)


def weight_from_json(s: str) -> WeightSpec:
    return weight_from_json_dict(json.loads(s))
