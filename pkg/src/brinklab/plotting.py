"""
Figures written next to the CSV output. Uses the non-interactive Agg backend
so runs work headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _style():
    plt.rcParams.update({
        "font.size": 10,
        "axes.labelsize": 11,
        "axes.spines.top": False,
        "axes.spines.right": False,
        "legend.frameon": False,
        "lines.linewidth": 1.5,
        "savefig.bbox": "tight",
    })


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_profiles(result, path, every: int | None = None) -> Path:
    """Density and potential profiles at a few output times (d=1), or final maps (d=2)."""
    _style()
    grid = result.grid
    if grid.dim == 2:
        fig, axes = plt.subplots(1, 3, figsize=(11, 3.4))
        s = result.final
        for ax, f, title in zip(axes, (s.n1, s.n2, result.potentials[-1]), ("n1", "n2", "W")):
            im = ax.imshow(f.values.T, origin="lower", extent=[-grid.L, grid.L, -grid.L, grid.L])
            ax.set_title(f"{title}, t={s.t:.3g}")
            fig.colorbar(im, ax=ax, shrink=0.8)
        return _save(fig, path)

    x = grid.centers
    idx = range(0, len(result.times), every or max(1, len(result.times) // 4))
    idx = sorted(set(idx) | {len(result.times) - 1})
    fig, ax = plt.subplots(figsize=(6.5, 3.8))
    cmap = plt.get_cmap("viridis")
    for j, k in enumerate(idx):
        c = cmap(j / max(1, len(idx) - 1))
        s = result.states[k]
        ax.plot(x, s.n1.values, color=c, label=f"t={s.t:.2f}")
        ax.plot(x, s.n2.values, color=c, ls="--")
    mask = (result.final.total.values > 1e-8 * result.final.total.max()) if result.final.total.max() > 0 else x == x
    if mask.any():
        lo, hi = x[mask].min(), x[mask].max()
        pad = 0.1 * (hi - lo) + grid.h
        ax.set_xlim(lo - pad, hi + pad)
    ax.set_xlabel("x")
    ax.set_ylabel("density (solid n1, dashed n2)")
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_diagnostics(columns: dict, path) -> Path:
    """Time series of the main diagnostics from a diagnostics.csv column dict."""
    _style()
    t = np.asarray(columns["t"])
    panels = [("mass1", "mass2"), ("entropy",), ("m2",), ("dissip", "gradW2"), ("gap2",), ("overlap",)]
    fig, axes = plt.subplots(2, 3, figsize=(10, 5.5), sharex=True)
    for ax, names in zip(axes.flat, panels):
        for n in names:
            ax.plot(t, columns[n], label=n)
        ax.legend(fontsize=8)
    for ax in axes[-1]:
        ax.set_xlabel("t")
    fig.tight_layout()
    return _save(fig, path)


def plot_sweep(columns: dict, path, slopes: dict | None = None) -> Path:
    """Log-log plot of every distance column against the sweep parameter."""
    _style()
    p = np.asarray(columns["param"])
    keep = p > 0
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    for name, vals in columns.items():
        if name == "param":
            continue
        v = np.asarray(vals)
        ok = keep & (v > 0)
        if not ok.any():
            continue
        label = name
        if slopes and name in slopes:
            label += f" (slope {slopes[name][0]:.2f})"
        ax.loglog(p[ok], v[ok], "o-", label=label)
    ax.set_xlabel("parameter")
    ax.set_ylabel("distance")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, path)
