"""Exact continuous-time simulation of the lattice processes.

All processes start from the all-vacant state and read the same replayable
clocks (:mod:`forestfire.clocks`), so for a fixed seed they are coupled
pathwise:

* ``sigma`` -- pure growth; a site is occupied once its growth clock has rung;
* ``eta`` -- growth plus ignition; an ignition on an occupied site burns its
  whole occupied cluster in the box at that instant;
* ``xi`` -- growth, with a single removal at ``t_c`` of every occupied cluster of
  an annulus ``B(5*3**i) minus B(3**i)`` (i even) that surrounds the origin;
* ``eta_L`` -- growth, and any cluster reaching size ``L`` burns immediately.

Rings are processed in time order; growth rings on occupied sites and ignition
rings on vacant sites do nothing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .clocks import GROWTH, ClockStream, ScriptedClocks
from .clusters import Grid, label_clusters, surrounds_origin_mask
from .eventlog import EventLog
from .lattice import NN, Region

P_C = 0.592746


def critical_time(p_c: float = P_C) -> float:
    """The time at which pure growth reaches density ``p_c``: ``1 - exp(-t_c) = p_c``."""
    if not 0.0 < p_c < 1.0:
        raise ValueError(f"p_c must lie in (0, 1), got {p_c}")
    return -math.log1p(-p_c)


T_C = critical_time(P_C)


@dataclass(frozen=True)
class TrajectoryConfig:
    """One trajectory: box radius ``n`` (or an explicit ``region``), horizon, seed and
    exactly one of ``lam`` (ignition rate) or ``L`` (size threshold)."""

    n: int
    horizon: float
    seed: int = 0
    lam: float | None = None
    L: int | None = None
    p_c: float = P_C
    region: Region | None = None

    def __post_init__(self):
        if (self.lam is None) == (self.L is None):
            raise ValueError("exactly one of lam and L must be given")
        if self.lam is not None and self.lam <= 0:
            raise ValueError(f"lam must be > 0, got {self.lam}")
        if self.L is not None and self.L < 2:
            raise ValueError(f"L must be >= 2, got {self.L}")
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if not self.horizon > 0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")

    @property
    def box(self) -> Region:
        return self.region if self.region is not None else Region.box(self.n)

    def header(self, model: str, clocks=None) -> dict:
        h = {
            "model": model,
            "n": self.n,
            "t": self.horizon,
            "seed": self.seed,
            "p_c": self.p_c,
            "region": self.box.to_dict(),
        }
        if self.lam is not None:
            h["lambda"] = self.lam
        else:
            h["L"] = self.L
        if clocks is not None and getattr(clocks, "scripted", False):
            h["clocks"] = "scripted"
        return h


def _log_from_records(region: Region, header: dict, rec) -> EventLog:
    rt, rs, rk = rec
    xs = region.xs.ravel()[rs].astype(np.int64)
    ys = region.ys.ravel()[rs].astype(np.int64)
    return EventLog(header, rt, xs, ys, rk, region)


def run_eta(config: TrajectoryConfig, clocks=None) -> EventLog:
    """Forest-fire trajectory on the box up to the horizon."""
    if config.lam is None:
        raise ValueError("run_eta needs an ignition rate")
    region = config.box
    clocks = ClockStream(config.seed, config.lam) if clocks is None else clocks
    t, s, k = clocks.events(region, config.horizon)
    rec = K.eta_loop(t, s, k, region.neighbor_table(NN), region.cells)
    return _log_from_records(region, config.header("eta", clocks), rec)


def run_eta_L(config: TrajectoryConfig, clocks=None) -> EventLog:
    """Threshold-model trajectory: clusters burn the moment they reach size ``L``."""
    if config.L is None:
        raise ValueError("run_eta_L needs a threshold L")
    region = config.box
    clocks = ClockStream(config.seed) if clocks is None else clocks
    t, s, k = clocks.events(region, config.horizon, ignition=False)
    rec = K.eta_threshold_loop(t, s, k, region.neighbor_table(NN), region.cells, int(config.L))
    return _log_from_records(region, config.header("eta_L", clocks), rec)


def run_sigma(seed: int, region: Region, t: float, clocks=None) -> Grid:
    """Pure growth: a site is occupied iff its growth clock rang in [0, t]."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    clocks = ClockStream(seed) if clocks is None else clocks
    return Grid(region, (clocks.first_times(region, GROWTH) <= t).astype(np.uint8))


def annulus_levels(region: Region) -> list[int]:
    """Even ``i >= 2`` whose annulus fits inside ``region``."""
    out = []
    i = 2
    while 5 * 3**i <= region.radius:
        if region.contains_region(Region.annulus(i)):
            out.append(i)
        i += 2
    return out


def surrounding_removal(occupied: np.ndarray, region: Region) -> tuple[np.ndarray, list[int]]:
    """Mask of sites removed at the critical time from the occupancy ``occupied``.

    For each annulus inside ``region``, the occupied clusters of the annulus (paths
    kept inside it) that contain a circuit around the origin are removed. A cluster
    can only do so if it meets all four half-axes, which prunes almost every cluster
    before the duality test.
    """
    removed = np.zeros(region.shape, dtype=bool)
    levels = annulus_levels(region)
    for i in levels:
        ann = Region.annulus(i)
        r0, c0 = ann.y0 - region.y0, ann.x0 - region.x0
        window = (slice(r0, r0 + ann.height), slice(c0, c0 + ann.width))
        occ = occupied[window] & ann.mask
        labels, count = label_clusters(occ, NN)
        if count == 0:
            continue
        cy, cx = -ann.y0, -ann.x0
        axes = (labels[cy, cx + 1 :], labels[cy, : cx][::-1], labels[cy + 1 :, cx], labels[:cy, cx][::-1])
        candidates = set(np.unique(axes[0]))
        for a in axes[1:]:
            candidates &= set(np.unique(a))
        candidates.discard(0)
        for lab in sorted(candidates):
            cluster = labels == lab
            if surrounds_origin_mask(cluster, ann):
                removed[window] |= cluster
    return removed, levels


def run_xi(seed: int, region: Region, t: float, p_c: float = P_C, clocks=None) -> Grid:
    """Growth with one removal of the surrounding annulus clusters at ``t_c``.

    Only annuli lying inside ``region`` are handled; the largest level used is
    recorded in ``grid.info['max_level']``.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    clocks = ClockStream(seed) if clocks is None else clocks
    t_c = critical_time(p_c)
    first = clocks.first_times(region, GROWTH)
    levels = annulus_levels(region)
    info = {"t_c": t_c, "max_level": max(levels) if levels else None}
    if t < t_c:
        return Grid(region, (first <= t).astype(np.uint8), info)
    removed, _ = surrounding_removal(first <= t_c, region)
    state = first <= t
    if removed.any():
        again = clocks.first_times_after(region, t_c, GROWTH)
        state = np.where(removed, again <= t, state)
    info["removed"] = int(removed.sum())
    return Grid(region, state.astype(np.uint8), info)


@dataclass(frozen=True)
class Scales:
    K: float
    k: float

    @property
    def K_radius(self) -> int:
        return math.floor(self.K + 1e-9)

    @property
    def k_radius(self) -> int:
        return math.floor(self.k + 1e-9)


def scales(lam: float) -> Scales:
    """Outer and inner radii ``lam**(-1/3)`` and ``lam**(-1/4)``."""
    if not 0 < lam <= 1:
        raise ValueError(f"lam must lie in (0, 1], got {lam}")
    return Scales(lam ** (-1.0 / 3.0), lam ** (-0.25))


def scales_L(L: int) -> Scales:
    """Threshold-model radii ``L**(1/3)`` and ``L**(1/4)``."""
    if L < 2:
        raise ValueError(f"L must be >= 2, got {L}")
    return Scales(L ** (1.0 / 3.0), L**0.25)


def replay(header: dict) -> EventLog:
    """Re-run the trajectory described by a log header."""
    if header.get("clocks") == "scripted":
        raise ValueError("logs driven by scripted clocks cannot be replayed from the header")
    model = header["model"]
    if model == "zeta":
        from .tree import TreeConfig, run_zeta

        return run_zeta(TreeConfig(header["n"], header["lambda"], header["t"], header["seed"]))
    cfg = TrajectoryConfig(
        n=header["n"],
        horizon=header["t"],
        seed=header["seed"],
        lam=header.get("lambda"),
        L=header.get("L"),
        p_c=header.get("p_c", P_C),
        region=Region.from_dict(header["region"]),
    )
    if model == "eta":
        return run_eta(cfg)
    if model == "eta_L":
        return run_eta_L(cfg)
    raise ValueError(f"unknown model {model!r}")


__all__ = [
    "P_C",
    "T_C",
    "ClockStream",
    "ScriptedClocks",
    "Scales",
    "TrajectoryConfig",
    "annulus_levels",
    "critical_time",
    "replay",
    "run_eta",
    "run_eta_L",
    "run_sigma",
    "run_xi",
    "scales",
    "scales_L",
    "surrounding_removal",
]
