"""Replayable Poisson clocks.

Every site carries a growth clock (rate 1) and an ignition clock (rate ``lam``).
The k-th ring of a clock is a pure function of ``(seed, x, y, kind, k)``, so any
number of processes can be driven by the *same* clocks and queries may come in
any order. Ignition rings for different ``lam`` are the unit-rate stream rescaled
by ``1/lam``, which couples runs across ignition rates as well.
"""
from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from . import _kernels as K
from .lattice import Region

GROWTH = 0
IGNITION = 1
_KIND_NAMES = {"growth": GROWTH, "ignition": IGNITION}


def _kind(kind) -> int:
    if isinstance(kind, str):
        return _KIND_NAMES[kind]
    if kind not in (GROWTH, IGNITION):
        raise ValueError(f"unknown clock kind {kind!r}")
    return int(kind)


class ClockStream:
    """Deterministic growth/ignition clocks for every lattice site."""

    scripted = False

    def __init__(self, seed: int, lam: float = 0.0):
        if lam < 0:
            raise ValueError(f"ignition rate must be >= 0, got {lam}")
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.lam = float(lam)
        self.key = np.uint64(self.seed)

    def __repr__(self) -> str:
        return f"ClockStream(seed={self.seed}, lam={self.lam})"

    def rate(self, kind) -> float:
        return 1.0 if _kind(kind) == GROWTH else self.lam

    def event_time(self, site, kind, index: int) -> float:
        """Time of the ``index``-th ring (0-based) of a clock."""
        rate = self.rate(kind)
        if rate <= 0:
            return np.inf
        return float(K.stream_event_time(self.key, site[0], site[1], _kind(kind), rate, int(index)))

    def times_until(self, site, kind, horizon: float) -> np.ndarray:
        return K.stream_times_until(self.key, site[0], site[1], _kind(kind), self.rate(kind), float(horizon))

    def _key_arrays(self, region: Region):
        idx = region.indices
        return region.xs.ravel()[idx].astype(np.int64), region.ys.ravel()[idx].astype(np.int64), idx

    def events(self, region: Region, horizon: float, growth: bool = True, ignition: bool = True):
        """All rings in ``[0, horizon]`` on ``region`` as (times, packed indices, kinds), time-sorted.

        Ties are broken by packed index, then growth before ignition.
        """
        xs, ys, idx = self._key_arrays(region)
        return K.generate_events(self.key, xs, ys, idx, float(horizon), self.lam, growth, ignition)

    def first_times(self, region: Region, kind=GROWTH) -> np.ndarray:
        """First ring of each cell of ``region``'s bounding rectangle (inf off the region)."""
        out = np.full(region.cells, np.inf)
        rate = self.rate(kind)
        if rate > 0:
            xs, ys, idx = self._key_arrays(region)
            out[idx] = K.first_times(self.key, xs, ys, _kind(kind), rate)
        return out.reshape(region.shape)

    def first_times_after(self, region: Region, after: float, kind=GROWTH) -> np.ndarray:
        out = np.full(region.cells, np.inf)
        rate = self.rate(kind)
        if rate > 0:
            xs, ys, idx = self._key_arrays(region)
            out[idx] = K.first_times_after(self.key, xs, ys, _kind(kind), rate, float(after))
        return out.reshape(region.shape)


class ScriptedClocks:
    """Clocks with hand-placed rings on chosen sites; all other sites follow ``base``.

    ``script`` maps ``(site, kind)`` to the ring times of that clock; a listed clock
    rings exactly at those times and nowhere else. With ``base=None`` unlisted
    clocks never ring.
    """

    scripted = True

    def __init__(self, script: Mapping, base: ClockStream | None = None):
        self.base = base
        self.script = {}
        for (site, kind), times in script.items():
            self.script[(tuple(site), _kind(kind))] = np.sort(np.asarray(times, dtype=float))
        self.lam = base.lam if base is not None else 0.0
        self.seed = base.seed if base is not None else None

    def __repr__(self) -> str:
        return f"ScriptedClocks({len(self.script)} clocks, base={self.base!r})"

    def _site_times(self, site, kind: int) -> np.ndarray | None:
        return self.script.get((tuple(site), kind))

    def event_time(self, site, kind, index: int) -> float:
        times = self._site_times(site, _kind(kind))
        if times is None:
            return self.base.event_time(site, kind, index) if self.base is not None else np.inf
        return float(times[index]) if index < times.size else np.inf

    def times_until(self, site, kind, horizon: float) -> np.ndarray:
        times = self._site_times(site, _kind(kind))
        if times is None:
            return self.base.times_until(site, kind, horizon) if self.base is not None else np.empty(0)
        return times[times <= horizon]

    def events(self, region: Region, horizon: float, growth: bool = True, ignition: bool = True):
        if self.base is not None:
            t, s, k = self.base.events(region, horizon, growth, ignition)
        else:
            t, s, k = np.empty(0), np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int8)
        keep = np.ones(t.size, dtype=bool)
        extra_t, extra_s, extra_k = [], [], []
        for (site, kind), times in self.script.items():
            if not region.contains(site) or (kind == GROWTH and not growth) or (kind == IGNITION and not ignition):
                continue
            i = region.index(site)
            keep &= ~((s == i) & (k == kind))
            sel = times[times <= horizon]
            extra_t.append(sel)
            extra_s.append(np.full(sel.size, i, dtype=np.int64))
            extra_k.append(np.full(sel.size, kind, dtype=np.int8))
        t = np.concatenate([t[keep], *extra_t])
        s = np.concatenate([s[keep], *extra_s])
        k = np.concatenate([k[keep], *extra_k])
        order = np.lexsort((k, s, t))
        return t[order], s[order], k[order]

    def first_times(self, region: Region, kind=GROWTH) -> np.ndarray:
        return self.first_times_after(region, -np.inf, kind)

    def first_times_after(self, region: Region, after: float, kind=GROWTH) -> np.ndarray:
        kind = _kind(kind)
        if self.base is not None:
            if after == -np.inf:
                out = self.base.first_times(region, kind)
            else:
                out = self.base.first_times_after(region, after, kind)
        else:
            out = np.full(region.shape, np.inf)
        for (site, kd), times in self.script.items():
            if kd != kind or not region.contains(site):
                continue
            later = times[times > after]
            out[site[1] - region.y0, site[0] - region.x0] = later[0] if later.size else np.inf
        return out
