"""Static PNG figures for experiment results (headless backend)."""
from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _series(rows, key, x, y):
    groups = defaultdict(list)
    for r in rows:
        groups[r[key]].append((r[x], r[y], r.get("lo"), r.get("hi")))
    return {k: sorted(v) for k, v in sorted(groups.items(), key=lambda kv: str(kv[0]))}


def _errorbars(ax, pts, label, **kw):
    xs = np.array([p[0] for p in pts], dtype=float)
    ys = np.array([p[1] for p in pts], dtype=float)
    if all(p[2] is not None for p in pts):
        lo = ys - np.array([p[2] for p in pts], dtype=float)
        hi = np.array([p[3] for p in pts], dtype=float) - ys
        ax.errorbar(xs, ys, yerr=[lo, hi], marker="o", capsize=3, label=label, **kw)
    else:
        ax.plot(xs, ys, marker="o", label=label, **kw)


def _save(fig, path, manifest_hash):
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Description": f"manifest={manifest_hash}"})
    plt.close(fig)


def plot_delta_scan(rows, path, manifest_hash=""):
    fig, ax = plt.subplots(figsize=(5, 4))
    for n, pts in _series(rows, "n", "delta", "estimate").items():
        _errorbars(ax, pts, f"n={n}")
    ax.set_xlabel("sprinkling probability delta")
    ax.set_ylabel("crossing probability")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    _save(fig, path, manifest_hash)


def plot_fire_stats(rows, path, manifest_hash=""):
    rate = "lambda" if "lambda" in rows[0] else "L"
    fig, ax = plt.subplots(figsize=(5, 4))
    for col, lab in (("one", ">=1 fire"), ("two", ">=2 fires")):
        pts = sorted((r[rate], r[col], r[f"{col}_lo"], r[f"{col}_hi"]) for r in rows)
        _errorbars(ax, pts, lab)
    if rate == "lambda":
        ax.set_xscale("log")
    ax.set_xlabel(rate)
    ax.set_ylabel("probability")
    ax.legend()
    _save(fig, path, manifest_hash)


def plot_bound_check(rows, path, manifest_hash=""):
    fig, ax = plt.subplots(figsize=(5, 4))
    for lam in sorted({r["lambda"] for r in rows}):
        sub = sorted((r for r in rows if r["lambda"] == lam), key=lambda r: r["t"])
        t = [r["t"] for r in sub]
        ax.errorbar(t, [r["lhs"] for r in sub], yerr=[3 * r["lhs_se"] for r in sub], marker="o", capsize=3, label=f"fire at origin, lambda={lam}")
        ax.errorbar(t, [r["rhs"] for r in sub], yerr=[3 * r["rhs_se"] for r in sub], marker="s", capsize=3, ls="--", label=f"bound, lambda={lam}")
    ax.set_xlabel("t")
    ax.set_ylabel("probability")
    ax.legend(fontsize=7)
    _save(fig, path, manifest_hash)


def plot_xi_probe(rows, path, manifest_hash=""):
    fig, ax = plt.subplots(figsize=(5, 4))
    for i, pts in _series(rows, "i", "eps", "estimate").items():
        _errorbars(ax, pts, f"i={i}")
    ax.set_xlabel("eps")
    ax.set_ylabel("crossing probability")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    _save(fig, path, manifest_hash)


def plot_tree_stats(rows, path, manifest_hash=""):
    fig, ax = plt.subplots(figsize=(5, 4))
    for n, pts in _series(rows, "n", "t", "estimate").items():
        _errorbars(ax, pts, f"depth {n}")
    ts = np.linspace(min(r["t"] for r in rows), max(r["t"] for r in rows), 200)
    from .tree import upper_bound

    ub = np.array([upper_bound(t) for t in ts])
    ax.plot(ts, ub, "k-", lw=1, label="upper bound")
    ax.plot(ts, ub / 2, "k:", lw=1, label="lower bound")
    ax.set_xlabel("t")
    ax.set_ylabel("P(root burns by t)")
    ax.legend(fontsize=7)
    _save(fig, path, manifest_hash)


def plot_occupancy(state, extent, path, title="", manifest_hash=""):
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(state, origin="lower", extent=extent, cmap="Greens", vmin=0, vmax=1, interpolation="nearest")
    ax.set_title(title)
    _save(fig, path, manifest_hash)


def plot_tree_occupancy(state, path, title="", manifest_hash=""):
    """Occupancy by depth: row d holds the 2^d nodes at that depth."""
    depth = int(np.log2(state.size))
    img = np.full((depth, 2 ** (depth - 1)), np.nan)
    for d in range(depth):
        row = state[2**d : 2 ** (d + 1)]
        img[d, :] = np.repeat(row, 2 ** (depth - 1 - d))
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.imshow(img, aspect="auto", cmap="Greens", vmin=0, vmax=1, interpolation="nearest")
    ax.set_ylabel("depth")
    ax.set_title(title)
    _save(fig, path, manifest_hash)


PLOTTERS = {
    "delta-scan": plot_delta_scan,
    "fire-stats": plot_fire_stats,
    "bound-check": plot_bound_check,
    "xi-probe": plot_xi_probe,
    "tree-stats": plot_tree_stats,
}
