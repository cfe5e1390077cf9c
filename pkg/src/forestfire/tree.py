"""Forest fires on the directed binary tree.

Nodes of ``T(n)`` are numbered in heap order: the root is 1 and the children of
``v`` are ``2v`` and ``2v + 1``; the binary expansion of a node is its path from
the root. Node ``v`` reads the clocks of lattice site ``(v - 1, 0)``, so the root
shares its clocks with the lattice origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .clocks import ClockStream
from .eventlog import BURN, EventLog

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class TreeConfig:
    n: int
    lam: float
    horizon: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if self.lam <= 0:
            raise ValueError(f"lam must be > 0, got {self.lam}")
        if not self.horizon > 0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")

    @property
    def nodes(self) -> int:
        return 2 ** (self.n + 1) - 1


def node_path(v: int) -> str:
    """Bit path of a heap index, root ``'1'``."""
    if v < 1:
        raise ValueError(f"not a node: {v}")
    return format(v, "b")


def _tree_events(clocks, nodes: int, horizon: float):
    heap = np.arange(1, nodes + 1, dtype=np.int64)
    if isinstance(clocks, ClockStream):
        return K.generate_events(clocks.key, heap - 1, np.zeros(nodes, dtype=np.int64), heap, float(horizon), clocks.lam, True, True)
    times, sites, kinds = [], [], []
    for v in heap.tolist():
        for kind in (0, 1):
            tt = clocks.times_until((v - 1, 0), kind, horizon)
            times.append(tt)
            sites.append(np.full(tt.size, v, dtype=np.int64))
            kinds.append(np.full(tt.size, kind, dtype=np.int8))
    t, s, k = np.concatenate(times), np.concatenate(sites), np.concatenate(kinds)
    order = np.lexsort((k, s, t))
    return t[order], s[order], k[order]


def run_zeta(config: TreeConfig, clocks=None) -> EventLog:
    """Trajectory of the tree process on ``T(n)`` from all vacant."""
    clocks = ClockStream(config.seed, config.lam) if clocks is None else clocks
    t, s, k = _tree_events(clocks, config.nodes, config.horizon)
    rt, rs, rk = K.tree_loop(t, s, k, config.nodes)
    header = {"model": "zeta", "n": config.n, "lambda": config.lam, "t": config.horizon, "seed": config.seed}
    if getattr(clocks, "scripted", False):
        header["clocks"] = "scripted"
    return EventLog(header, rt, rs, np.zeros(rs.size, dtype=np.int64), rk)


def first_burn_time(log: EventLog, node: int = 1) -> float:
    """First time ``node`` burns in a tree log (inf if never)."""
    hit = np.flatnonzero((log.type == BURN) & (log.x == node))
    return float(log.time[hit[0]]) if hit.size else math.inf


def theta_tree(p: float) -> float:
    """Percolation probability of the directed binary tree."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return 0.0 if p <= 0.5 else (2.0 * p - 1.0) / p


def upper_bound(t: float) -> float:
    """Limit upper bound on the probability that the root burns before ``t``."""
    if not t > 0:
        raise ValueError(f"t must be > 0, got {t}")
    e = math.exp(-t)
    return max(0.0, (1.0 - 2.0 * e) / (1.0 - e))


def lower_bound(t: float) -> float:
    """Limit lower bound: half the upper bound."""
    return 0.5 * upper_bound(t)


def recursion_rhs(g_n: float, f_n_ttilde: float, t_tilde: float, lam: float) -> float:
    """Right-hand side of the one-step lower bound for ``g_{n+1}(t_tilde, t)``.

    The root's first fire lands in ``(t_tilde, t]`` if the root grew before
    ``t_tilde``, was not ignited before ``t_tilde``, and the children (independent
    copies of depth ``n``) have no fire before ``t_tilde`` but at least one in the window.
    """
    if not (0.0 <= g_n <= 1.0 and 0.0 <= f_n_ttilde <= 1.0):
        raise ValueError("g_n and f_n must lie in [0, 1]")
    if t_tilde <= 0 or lam <= 0:
        raise ValueError("t_tilde and lam must be positive")
    return (1.0 - math.exp(-t_tilde)) * math.exp(-lam * t_tilde) * (g_n * g_n + 2.0 * g_n * (1.0 - f_n_ttilde))
