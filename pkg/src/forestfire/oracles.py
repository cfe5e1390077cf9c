"""Slow, independent reference implementations used by the test-suite and ``selftest``.

None of these share code paths with the production routines they check.
"""
from __future__ import annotations

import math
from collections import deque

import networkx as nx
import numpy as np
from numba import njit

from .lattice import Adjacency


def _angle_step(u, w) -> float:
    """Signed angle swept around the origin along the segment u -> w (|step| < pi)."""
    a = math.atan2(w[1], w[0]) - math.atan2(u[1], u[0])
    while a <= -math.pi:
        a += 2 * math.pi
    while a > math.pi:
        a -= 2 * math.pi
    return a


def _graph(sites, adj: Adjacency) -> nx.Graph:
    sites = set(map(tuple, sites))
    g = nx.Graph()
    g.add_nodes_from(sites)
    for x, y in sites:
        for dx, dy in Adjacency(adj).offsets:
            w = (x + dx, y + dy)
            if w in sites:
                g.add_edge((x, y), w)
    return g


def has_winding_cycle(sites, adj: Adjacency) -> bool:
    """Does the graph on ``sites`` contain a cycle winding around the origin?

    Assigns unwrapped angles along a BFS forest; a non-tree edge whose angle
    mismatch is a nonzero multiple of 2*pi closes a fundamental cycle with nonzero
    winding. Winding is additive over the cycle space, so no such edge means no
    winding cycle at all. The origin must not be in ``sites``.
    """
    sites = set(map(tuple, sites))
    if (0, 0) in sites:
        raise ValueError("origin must not be a vertex")
    g = _graph(sites, adj)
    theta: dict = {}
    for root in sorted(sites):
        if root in theta:
            continue
        theta[root] = math.atan2(root[1], root[0])
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in g.neighbors(u):
                step = theta[u] + _angle_step(u, w)
                if w not in theta:
                    theta[w] = step
                    queue.append(w)
                elif abs(step - theta[w]) > math.pi:
                    return True
    return False


def has_winding_cycle_bruteforce(sites, adj: Adjacency, length_bound: int | None = None) -> bool:
    """Enumerate simple cycles and test each one's winding number. Exponential; tiny inputs only."""
    g = _graph(sites, adj)
    for cycle in nx.simple_cycles(g, length_bound=length_bound):
        if len(cycle) < 3:
            continue
        total = sum(_angle_step(cycle[j], cycle[(j + 1) % len(cycle)]) for j in range(len(cycle)))
        if round(total / (2 * math.pi)) != 0:
            return True
    return False


def surrounds_origin_oracle(cluster_sites) -> bool:
    return has_winding_cycle(cluster_sites, Adjacency.NEAREST_NEIGHBOR)


def vacant_star_circuit_oracle(vacant_sites) -> bool:
    return has_winding_cycle(vacant_sites, Adjacency.STAR)


def reachable(sites, start, adj: Adjacency) -> set:
    """Plain BFS closure of ``start`` inside ``sites``."""
    sites = set(map(tuple, sites))
    start = tuple(start)
    if start not in sites:
        return set()
    seen = {start}
    queue = deque([start])
    while queue:
        x, y = queue.popleft()
        for dx, dy in Adjacency(adj).offsets:
            w = (x + dx, y + dy)
            if w in sites and w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


class NaivePartition:
    """Set-of-sets model of the epoch union-find."""

    def __init__(self):
        self.blocks: list[set] = []

    def insert(self, h):
        self.blocks.append({h})

    def block(self, h) -> set:
        for b in self.blocks:
            if h in b:
                return b
        raise KeyError(h)

    def union(self, a, b):
        ba, bb = self.block(a), self.block(b)
        if ba is not bb:
            ba |= bb
            self.blocks.remove(bb)

    def burn(self, h) -> set:
        b = self.block(h)
        self.blocks.remove(b)
        return b


@njit(cache=True)
def _chain_first_fire(h, w, oy, ox, lam, dt, horizon, reps, seed):
    np.random.seed(seed)
    p_grow = 1.0 - math.exp(-dt)
    p_ign = 1.0 - math.exp(-lam * dt)
    nsteps = int(round(horizon / dt))
    out = np.full(reps, np.inf)
    state = np.zeros((h, w), dtype=np.uint8)
    grew = np.empty((h * w, 2), dtype=np.int64)
    lit = np.empty((h * w, 2), dtype=np.int64)
    stack = np.empty((h * w, 2), dtype=np.int64)
    for r in range(reps):
        state[:, :] = 0
        for step in range(nsteps):
            ng = 0
            ni = 0
            for i in range(h):
                for j in range(w):
                    u = np.random.random()
                    if state[i, j] == 0:
                        if u < p_grow:
                            grew[ng, 0] = i
                            grew[ng, 1] = j
                            ng += 1
                    elif u < p_ign:
                        lit[ni, 0] = i
                        lit[ni, 1] = j
                        ni += 1
            origin_burnt = False
            for q in range(ni):
                i, j = lit[q, 0], lit[q, 1]
                if state[i, j] == 0:
                    continue
                state[i, j] = 0
                if i == oy and j == ox:
                    origin_burnt = True
                top = 1
                stack[0, 0] = i
                stack[0, 1] = j
                while top > 0:
                    top -= 1
                    a, b = stack[top, 0], stack[top, 1]
                    for da, db in ((0, 1), (0, -1), (1, 0), (-1, 0)):
                        a2, b2 = a + da, b + db
                        if 0 <= a2 < h and 0 <= b2 < w and state[a2, b2] == 1:
                            state[a2, b2] = 0
                            if a2 == oy and b2 == ox:
                                origin_burnt = True
                            stack[top, 0] = a2
                            stack[top, 1] = b2
                            top += 1
            if origin_burnt:
                out[r] = (step + 1) * dt
                break
            for q in range(ng):
                state[grew[q, 0], grew[q, 1]] = 1
    return out


def discretized_first_fire(shape, origin, lam: float, horizon: float, reps: int, seed: int, dt: float = 1e-3) -> np.ndarray:
    """First fire time at ``origin`` in a fixed-step approximation of the forest-fire chain.

    Each step of length ``dt``: every vacant cell grows with probability
    ``1 - exp(-dt)``, every occupied cell ignites with probability ``1 - exp(-lam*dt)``;
    ignited clusters burn first, growth is applied after. ``shape`` is (rows, cols)
    and ``origin`` is (row, col). Returns inf where no fire reached ``origin``.
    """
    h, w = shape
    return _chain_first_fire(h, w, origin[0], origin[1], lam, dt, horizon, reps, seed)
