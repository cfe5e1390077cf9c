"""Oracle-equivalence suites: production routines against slow independent references."""
from __future__ import annotations

import math

import numpy as np

from .clusters import ClusterIndex, has_vacant_star_circuit_mask, label_clusters, surrounds_origin_mask
from .dynamics import TrajectoryConfig, run_eta
from .experiments import first_fire
from .harness import replica_seeds
from .lattice import NN, Region
from .oracles import NaivePartition, discretized_first_fire, surrounds_origin_oracle, vacant_star_circuit_oracle

KS_C_001 = 1.9495  # two-sample Kolmogorov critical coefficient at level 0.001


def random_ring(rng, max_outer: int = 15, max_hole: int = 3) -> Region:
    hole = int(rng.integers(0, max_hole + 1))
    outer = int(rng.integers(hole + 1, max_outer + 1))
    return Region.ring(hole, outer)


def duality_case(rng, ring: Region) -> list[tuple[bool, bool, str]]:
    """(fast answer, oracle answer, label) for every check on one random configuration."""
    p = rng.uniform(0.3, 0.9)
    occupied = (rng.random(ring.shape) < p) & ring.mask
    out = []
    flat = occupied.ravel()
    vacant_sites = [tuple(v) for v in ring.sites() if not flat[ring.index(v)]]
    out.append((has_vacant_star_circuit_mask(occupied, ring), vacant_star_circuit_oracle(vacant_sites), "vacant circuit"))
    labels, count = label_clusters(occupied, NN)
    for lab in range(1, count + 1):
        cluster = labels == lab
        ys, xs = np.nonzero(cluster)
        sites = [(int(x) + ring.x0, int(y) + ring.y0) for y, x in zip(ys, xs)]
        out.append((surrounds_origin_mask(cluster, ring), surrounds_origin_oracle(sites), "surrounding cluster"))
    return out


def duality_suite(cases: int = 200, seed: int = 0) -> tuple[int, int]:
    """(disagreements, comparisons) over random rings inside B(15)."""
    rng = np.random.default_rng(seed)
    bad = total = 0
    for _ in range(cases):
        for fast, slow, _ in duality_case(rng, random_ring(rng)):
            total += 1
            bad += fast != slow
    return bad, total


def union_find_suite(scripts: int = 50, steps: int = 400, seed: int = 0) -> int:
    """Random insert/union/burn scripts; returns the number of mismatches with the naive partition."""
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(scripts):
        idx = ClusterIndex(capacity=4)
        ref = NaivePartition()
        live: list[int] = []
        for _ in range(steps):
            op = rng.random()
            if op < 0.45 or len(live) < 2:
                h = idx.insert()
                ref.insert(h)
                live.append(h)
            elif op < 0.9:
                a, b = (live[j] for j in rng.choice(len(live), 2))
                idx.union(a, b)
                ref.union(a, b)
            else:
                h = live[int(rng.integers(len(live)))]
                got = set(idx.burn(h))
                want = ref.burn(h)
                bad += got != want
                live = [x for x in live if x not in want]
            for h in live[:: max(1, len(live) // 8)]:
                block = ref.block(h)
                bad += idx.size(h) != len(block)
                bad += set(idx.members(h)) != block
    return bad


def ks_distance(a, b) -> float:
    """Two-sample Kolmogorov distance; infinite values (no event) are allowed."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    grid = np.concatenate((a, b))
    grid = grid[np.isfinite(grid)]
    if grid.size == 0:
        return 0.0
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_threshold(n: int, m: int, coefficient: float = KS_C_001) -> float:
    return coefficient * math.sqrt((n + m) / (n * m))


CHAIN_REGION = Region.rect(-5, 4, -5, 4)


def exact_first_fires(replicas: int, seed: int, lam: float = 0.1, horizon: float = 5.0, region: Region = CHAIN_REGION) -> np.ndarray:
    return np.array(
        [first_fire(run_eta(TrajectoryConfig(0, horizon, s, lam=lam, region=region)), 0) for s in replica_seeds(seed, replicas)]
    )


def chain_first_fires(replicas: int, seed: int, lam: float = 0.1, horizon: float = 5.0, region: Region = CHAIN_REGION, dt: float = 1e-3) -> np.ndarray:
    origin = (-region.y0, -region.x0)
    return discretized_first_fire(region.shape, origin, lam, horizon, replicas, seed, dt)


def run_all(seed: int = 0, replicas: int = 2000) -> list[dict]:
    rows = []
    bad, total = duality_suite(200, seed)
    rows.append({"suite": "duality", "ok": bad == 0, "detail": f"{bad} disagreements in {total} comparisons"})
    bad = union_find_suite(seed=seed)
    rows.append({"suite": "union-find", "ok": bad == 0, "detail": f"{bad} mismatches"})
    exact = exact_first_fires(replicas, seed)
    chain = chain_first_fires(replicas, seed + 1)
    d = ks_distance(exact, chain)
    thr = ks_threshold(replicas, replicas)
    rows.append({"suite": "event-loop vs discretized chain", "ok": d < thr, "detail": f"KS {d:.4f} (threshold {thr:.4f}, {replicas} replicas each)"})
    return rows
