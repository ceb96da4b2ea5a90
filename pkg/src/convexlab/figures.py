"""Figure rendering for CLI reports: every report path saves a PNG next to its CSV."""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def convexity_figure(times, log_values, verdict: bool, path) -> None:
    """log F(t) against the endpoint chord; convexity means staying below it."""
    t = np.asarray(times)
    L = np.asarray(log_values)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, L, "o-", ms=3, label="log F(t)")
    if np.isfinite(L).all():
        chord = (1 - (t - t[0]) / (t[-1] - t[0])) * L[0] + (t - t[0]) / (t[-1] - t[0]) * L[-1]
        ax.plot(t, chord, "--", color="gray", label="endpoint chord")
    ax.set_xlabel("t")
    ax.set_ylabel("log F")
    ax.set_title(f"log-convexity: {'PASS' if verdict else 'FAIL'}")
    ax.legend(fontsize=8)
    _save(fig, path)


def scan_figure(js, xs, vals, expression: str, argmin, path) -> None:
    """Minimum over x per order, plus the global argmin marker."""
    js = np.asarray(js)
    vals = np.asarray(vals)
    fig, ax = plt.subplots(figsize=(6, 4))
    finite = np.where(np.isfinite(vals), vals, np.nan)
    permin = np.nanmin(finite, axis=1)
    ax.semilogy(js, np.maximum(permin, 1e-300), "-", lw=1)
    ax.axhline(0, color="gray", lw=0.5)
    ax.plot([argmin[0]], [max(np.nanmin(permin), 1e-300)], "rv", label=f"argmin x={argmin[1]:.3g}")
    ax.set_xlabel("order j")
    ax.set_ylabel("min over x of the margin")
    ax.set_title(expression)
    ax.legend(fontsize=8)
    _save(fig, path)


def evolve_figure(window_dim, grids, initial_abs, final_abs, t, path) -> None:
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    if window_dim == 1:
        j = grids[0]
        for ax, (vals, title) in zip(axes, ((initial_abs, "|u(0)|"), (final_abs, f"|u({t:g})|"))):
            ax.semilogy(j, np.maximum(vals, 1e-300), "-")
            ax.set_xlabel("j")
            ax.set_title(title)
    else:
        for ax, (vals, title) in zip(axes, ((initial_abs, "|u(0)|"), (final_abs, f"|u({t:g})|"))):
            with np.errstate(divide="ignore"):
                im = ax.imshow(np.log10(np.maximum(vals, 1e-300)), origin="lower", cmap="viridis")
            fig.colorbar(im, ax=ax, shrink=0.8)
            ax.set_title(f"log10 {title}")
    _save(fig, path)


def carleman_figure(rows, path) -> None:
    """LHS/RHS ratio of the weighted inequality per R, grouped by (mu, eps)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    groups = {}
    for row in rows:
        key = (row["params"]["mu"], row["params"]["eps"], row.get("profile", ""))
        groups.setdefault(key, []).append((row["params"]["R"], row["ratio"]))
    for (mu, eps, prof), pts in sorted(groups.items()):
        pts.sort()
        rr = [p[0] for p in pts]
        ratio = [max(p[1], 1e-300) for p in pts]
        ax.semilogy(rr, ratio, "o-", ms=3, label=f"mu={mu} eps={eps} {prof}")
    ax.axhline(1.0, color="red", lw=0.8, label="equality")
    ax.set_xlabel("R")
    ax.set_ylabel("LHS / RHS")
    ax.set_title("weighted inequality margin")
    ax.legend(fontsize=7)
    _save(fig, path)


def hardy_figure(js, log_u1, beta_star, log_envelope, a, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(js, log_u1, "-", lw=1, label="log |u_j(1)|")
    ax.plot(js, log_envelope, "--", lw=1, label=f"log C I_j({beta_star:.4f})")
    ax.set_xlabel("j")
    ax.set_ylabel("log magnitude")
    ax.set_title(f"two-time envelope, a={a:g}: a + beta* = {a + beta_star:.4f}")
    ax.legend(fontsize=8)
    _save(fig, path)
