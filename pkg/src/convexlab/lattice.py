"""Finite-window complex lattice functions on Z^d and the discrete Laplacian.

A window is the box {j : |j_k| <= R_k}; everything outside is treated as zero
(Dirichlet truncation).  Fields are immutable value objects wrapping a dense
complex array indexed so that array index i_k corresponds to site j_k = i_k - R_k.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

_MAX_SITES = 10**8


class WindowMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeWindow:
    """Box window on Z^d, d <= 3: sites {j : |j_k| <= radius[k]}."""

    dim: int
    radius: tuple[int, ...]

    def __post_init__(self):
        if not (1 <= self.dim <= 3):
            raise ValueError(f"dim must be in 1..3, got {self.dim}")
        radius = tuple(int(r) for r in (self.radius if isinstance(self.radius, (tuple, list)) else (self.radius,)))
        if len(radius) == 1 and self.dim > 1:
            radius = radius * self.dim
        if len(radius) != self.dim:
            raise ValueError("radius must give one positive integer per axis")
        if any(r < 1 for r in radius):
            raise ValueError("radii must be positive")
        object.__setattr__(self, "radius", radius)
        if self.site_count > _MAX_SITES:
            raise ValueError(f"window has {self.site_count} sites, cap is {_MAX_SITES}")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(2 * r + 1 for r in self.radius)

    @property
    def site_count(self) -> int:
        return int(np.prod([2 * r + 1 for r in self.radius]))

    def axes(self) -> list[np.ndarray]:
        """Per-axis site coordinates j_k = -R_k .. R_k."""
        return [np.arange(-r, r + 1) for r in self.radius]

    def coordinate_grids(self) -> list[np.ndarray]:
        """Meshgrid ('ij') of site coordinates, one array per axis."""
        return list(np.meshgrid(*self.axes(), indexing="ij"))

    def index_of(self, site) -> tuple[int, ...]:
        """Array index of a site tuple; bijective window -> [0, N)."""
        site = tuple(int(s) for s in (site if np.iterable(site) else (site,)))
        if len(site) != self.dim:
            raise ValueError("site arity does not match window dimension")
        for s, r in zip(site, self.radius):
            if abs(s) > r:
                raise ValueError(f"site {site} outside window")
        return tuple(s + r for s, r in zip(site, self.radius))

    def to_json_dict(self) -> dict:
        return {"dim": self.dim, "radius": list(self.radius)}

    @classmethod
    def from_json_dict(cls, d: dict) -> "LatticeWindow":
        return cls(dim=int(d["dim"]), radius=tuple(d["radius"]))


@dataclass(frozen=True)
class Field:
    """Complex amplitudes on a window at a time label in [0, 1]."""

    window: LatticeWindow
    values: np.ndarray = field(repr=False)
    time_label: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.window.shape:
            raise ValueError(f"values shape {values.shape} does not match window {self.window.shape}")
        if not np.all(np.isfinite(values.view(float))):
            raise ValueError("field contains NaN/Inf")
        if np.abs(values).max(initial=0.0) > 1e150:
            raise ValueError("amplitudes exceed 1e150; l2 norm could overflow")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, window: LatticeWindow, time_label: float = 0.0) -> "Field":
        return cls(window, np.zeros(window.shape, dtype=complex), time_label)

    @classmethod
    def delta(cls, window: LatticeWindow, site=None, time_label: float = 0.0) -> "Field":
        values = np.zeros(window.shape, dtype=complex)
        idx = window.index_of(site if site is not None else (0,) * window.dim)
        values[idx] = 1.0
        return cls(window, values, time_label)

    @classmethod
    def from_profile(cls, window: LatticeWindow, fn, time_label: float = 0.0) -> "Field":
        """Field with values fn(j_1, ..., j_d) evaluated on the coordinate grids."""
        grids = window.coordinate_grids()
        return cls(window, np.asarray(fn(*grids), dtype=complex), time_label)

    def with_values(self, values: np.ndarray, time_label=None) -> "Field":
        return Field(self.window, values, self.time_label if time_label is None else time_label)

    def __getitem__(self, site) -> complex:
        return complex(self.values[self.window.index_of(site)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def support_radius(self) -> int:
        """Largest |j_k| over sites with nonzero amplitude (-1 for the zero field)."""
        nz = np.nonzero(self.values)
        if len(nz[0]) == 0:
            return -1
        return max(int(np.max(np.abs(ix - r))) for ix, r in zip(nz, self.window.radius))


def laplacian(f: Field) -> Field:
    """Discrete Laplacian sum_k (f_{j+e_k} - 2 f_j + f_{j-e_k}); zero outside the window."""
    v = f.values
    out = -2.0 * f.window.dim * v
    for ax in range(f.window.dim):
        shifted_fwd = np.zeros_like(v)
        shifted_bwd = np.zeros_like(v)
        src = [slice(None)] * f.window.dim
        dst = [slice(None)] * f.window.dim
        src[ax] = slice(1, None)
        dst[ax] = slice(None, -1)
        shifted_fwd[tuple(dst)] = v[tuple(src)]   # f_{j+e_k}
        shifted_bwd[tuple(src)] = v[tuple(dst)]   # f_{j-e_k}
        out = out + shifted_fwd + shifted_bwd
    return f.with_values(out)


def inner_product(f: Field, g: Field) -> complex:
    """<f, g> = sum_j f_j conj(g_j); conjugate-linear in the second slot.

    numpy's pairwise-tree summation makes the reduction order deterministic
    for a fixed window shape.
    """
    if f.window != g.window:
        raise WindowMismatchError("inner_product requires identical windows")
    return complex(np.sum(f.values * np.conj(g.values)))


# ----------------------------------------------------------------------------
# serialization: CSV (j_1..j_d, re, im) and JSON; decimal-17 round-trips bit-exact
# ----------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def field_to_csv(f: Field, fp) -> None:
    """RFC-4180 CSV with header; one row per site in C order."""
    w = csv.writer(fp)
    w.writerow([f"j{k+1}" for k in range(f.window.dim)] + ["re", "im"])
    grids = [g.ravel() for g in f.window.coordinate_grids()]
    flat = f.values.ravel()
    for i in range(flat.size):
        w.writerow([str(int(g[i])) for g in grids] + [_fmt(flat[i].real), _fmt(flat[i].imag)])


def field_from_csv(fp, time_label: float = 0.0) -> Field:
    rows = list(csv.reader(fp))
    header, rows = rows[0], rows[1:]
    dim = len(header) - 2
    sites = np.array([[int(c) for c in row[:dim]] for row in rows])
    radius = tuple(int(np.max(np.abs(sites[:, k]))) for k in range(dim))
    window = LatticeWindow(dim=dim, radius=radius)
    values = np.zeros(window.shape, dtype=complex)
    for row in rows:
        idx = window.index_of(tuple(int(c) for c in row[:dim]))
        values[idx] = complex(float(row[dim]), float(row[dim + 1]))
    return Field(window, values, time_label)


def field_to_json_dict(f: Field) -> dict:
    flat = f.values.ravel()
    return {
        "window": f.window.to_json_dict(),
        "time_label": f.time_label,
        "values_re": [_fmt(z.real) for z in flat],
        "values_im": [_fmt(z.imag) for z in flat],
    }


def field_from_json_dict(d: dict) -> Field:
    window = LatticeWindow.from_json_dict(d["window"])
    re = np.array([float(s) for s in d["values_re"]])
    im = np.array([float(s) for s in d["values_im"]])
    values = (re + 1j * im).reshape(window.shape)
    return Field(window, values, float(d["time_label"]))


def field_to_json(f: Field) -> str:
    return json.dumps(field_to_json_dict(f), sort_keys=True)


def field_from_json(s: str) -> Field:
    return field_from_json_dict(json.loads(s))
