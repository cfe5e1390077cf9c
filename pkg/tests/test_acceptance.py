"""End-to-end acceptance checks at their stated sizes and tolerances.

Each test records one PASS/FAIL line; the lines are printed in the terminal summary
(and directly when this file is run as a script).
"""
import math
import time

import numpy as np
import pytest

from forestfire.cli import run as cli_run
from forestfire.clocks import GROWTH, ClockStream
from forestfire.clusters import has_vacant_star_circuit_mask, label_clusters, surrounds_origin_mask
from forestfire.dynamics import T_C, TrajectoryConfig, run_eta, run_eta_L, run_sigma
from forestfire.eventlog import GROW
from forestfire.experiments import (
    FireStatConfig,
    bound_check,
    center_occupancy_check,
    delta_scan,
    fire_outcomes,
    level_seed,
    recursion_check,
    tree_first_burns,
)
from forestfire.harness import replica_seeds
from forestfire.lattice import NN, STAR, Region
from forestfire.oracles import has_winding_cycle_bruteforce
from forestfire.selftest import chain_first_fires, duality_suite, exact_first_fires, ks_distance
from forestfire.stats import mean_se
from forestfire.tree import theta_tree, upper_bound

RESULTS: list[str] = []


def record(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_01_bernoulli_identity():
    start = time.perf_counter()
    region = Region.box(50)
    means, corrs = [], []
    for s in replica_seeds(101, 100):
        g = run_sigma(s, region, 1.0).state.astype(float)
        means.append(g.mean())
        a = np.concatenate((g[:, :-1].ravel(), g[:-1, :].ravel()))
        b = np.concatenate((g[:, 1:].ravel(), g[1:, :].ravel()))
        corrs.append(np.corrcoef(a, b)[0, 1])
    elapsed = time.perf_counter() - start
    m, se = mean_se(means)
    c, cse = mean_se(corrs)
    target = 1 - math.exp(-1)
    ok = abs(m - target) <= 3 * se and abs(c) <= 3 * cse and elapsed < 10
    record(1, ok, f"mean {m:.5f} (target {target:.5f}, SE {se:.5f}); nn correlation {c:+.5f} (SE {cse:.5f}); {elapsed:.1f}s")


def test_criterion_02_duality_oracle():
    start = time.perf_counter()
    bad, total = duality_suite(1000, seed=202)
    # exhaustive cycle enumeration on the rings where it is feasible
    rng = np.random.default_rng(203)
    brute_bad = brute_total = 0
    for _ in range(1000):
        ring = Region.ring(int(rng.integers(0, 2)), 2)
        occ = (rng.random(ring.shape) < rng.uniform(0.3, 0.9)) & ring.mask
        flat = occ.ravel()
        occupied = [tuple(v) for v in ring.sites() if flat[ring.index(v)]]
        vacant = [tuple(v) for v in ring.sites() if not flat[ring.index(v)]]
        brute_total += 2
        brute_bad += has_vacant_star_circuit_mask(occ, ring) != has_winding_cycle_bruteforce(vacant, STAR)
        brute_bad += surrounds_origin_mask(occ, ring) != has_winding_cycle_bruteforce(occupied, NN)
    elapsed = time.perf_counter() - start
    ok = bad == 0 and brute_bad == 0 and elapsed < 60
    record(
        2, ok,
        f"{total - bad}/{total} agree with the winding oracle on 1000 rings up to B(15)\\B(3); "
        f"{brute_total - brute_bad}/{brute_total} agree with cycle enumeration; {elapsed:.1f}s",
    )


def test_criterion_03_event_loop_exactness():
    start = time.perf_counter()
    exact = exact_first_fires(10_000, 301)
    chain = chain_first_fires(10_000, 302)
    d = ks_distance(exact, chain)
    elapsed = time.perf_counter() - start
    record(3, d < 0.03 and elapsed < 300, f"KS distance {d:.4f} < 0.03 (10x10 box, lambda 0.1, horizon 5, 10^4 each); {elapsed:.1f}s")


def test_criterion_04_pathwise_domination():
    # eta rises only at its grow records and sigma never falls, so checking each
    # grow record against the first growth ring covers every site at every event time
    violations = 0
    records = 0
    region = Region.box(64)
    for s in replica_seeds(401, 1000):
        log = run_eta(TrajectoryConfig(64, 3.0, s, lam=0.05))
        first = ClockStream(s, 0.05).first_times(region, GROWTH)
        g = log.type == GROW
        t_first = first[log.y[g] + 64, log.x[g] + 64]
        violations += int(np.sum(log.time[g] < t_first))
        records += len(log)
    record(4, violations == 0, f"{violations} violations over 1000 trajectories ({records} events, n=64, lambda 0.05, horizon 3)")


def test_criterion_05_simple_bound():
    start = time.perf_counter()
    cfg = FireStatConfig("eta", 128, 0, T_C, lam=0.01, replicas=10_000, seed=501)
    reports = bound_check(cfg, times=(0.5, T_C))
    elapsed = time.perf_counter() - start
    ok = all(r.holds and r.necessary_violations == 0 for r in reports) and elapsed < 600
    detail = "; ".join(
        f"t={r.t:.4f}: LHS {r.lhs:.4f} <= RHS {r.rhs:.4f} + 3*{r.combined_se:.4f}, "
        f"necessary condition {r.origin_burns - r.necessary_violations}/{r.origin_burns}"
        for r in reports
    )
    record(5, ok, f"{detail}; {elapsed:.0f}s")


def test_criterion_06_center_formula():
    start = time.perf_counter()
    rows = center_occupancy_check(32, (0.0, 0.25, 0.5), replicas=10_000, seed=601)
    scan = delta_scan([32], (0.0, 0.25, 0.5, 1.0), replicas=10_000, seed=602)
    est = [r["estimate"] for r in scan]
    elapsed = time.perf_counter() - start
    ok = all(r["ok"] for r in rows) and est[-1] == 1.0 and est == sorted(est) and elapsed < 600
    detail = "; ".join(f"delta {r['delta']}: {r['observed']:.4f} vs {r['predicted']:.4f} (SE {r['se']:.4f})" for r in rows)
    record(6, ok, f"{detail}; p(1) = {est[-1]}; p(delta) = {[round(e, 4) for e in est]}; {elapsed:.0f}s")


def test_criterion_07_threshold_invariant():
    region = Region.rect(-25, 24, -25, 24)
    L = 30
    checkpoints = np.linspace(0.1, 2.0, 20)
    violations = 0
    largest = 0
    for s in replica_seeds(701, 1000):
        log = run_eta_L(TrajectoryConfig(0, 2.0, s, L=L, region=region))
        for t in checkpoints:
            labels, n = label_clusters(log.state_at(t).astype(bool), NN)
            if n:
                big = int(np.bincount(labels.ravel())[1:].max())
                largest = max(largest, big)
                violations += big >= L
    record(7, violations == 0, f"{violations} scans with a cluster of size >= {L} (1000 trajectories x 20 times; largest seen {largest})")


def test_criterion_08_two_fire_trend():
    start = time.perf_counter()
    lams = (0.1, 0.03, 0.01)
    reps = 1000
    outcomes = [
        np.array([o.two_fires for o in fire_outcomes(FireStatConfig("eta", 128, 9, T_C + 0.05, lam=lam, replicas=reps, seed=801))], dtype=float)
        for lam in lams
    ]
    probs = [float(o.mean()) for o in outcomes]
    steps = []
    ok = True
    for a, b in zip(outcomes, outcomes[1:]):
        diff, se = mean_se(list(b - a))  # paired: replicas share seeds across lambda
        steps.append(f"{diff:+.4f} (SE {se:.4f})")
        ok &= diff <= 2 * se
    elapsed = time.perf_counter() - start
    ok &= elapsed < 1200
    record(8, ok, f"P(>=2 fires in B(9) by t_c+0.05) at lambda {lams}: {[round(p, 4) for p in probs]}; steps {', '.join(steps)}; {elapsed:.0f}s")


def test_criterion_09_tree():
    start = time.perf_counter()
    hand = (
        theta_tree(0.5) == 0.0
        and theta_tree(1.0) == 1.0
        and abs(upper_bound(math.log(2))) < 1e-15
        and abs(upper_bound(1.0) - 0.41802) < 5e-6
    )
    lines = []
    ok = hand
    lam, tt, t, reps = 1e-3, 0.8, 1.2, 10_000
    for n in (8, 10, 12):
        r = recursion_check(n, lam, tt, t, replicas=reps, seed=901)
        burns = tree_first_burns(n, lam, t, reps, level_seed(901, n))
        f = float(np.mean(burns <= t))
        se = math.sqrt(f * (1 - f) / reps)
        bound_ok = f <= upper_bound(t) + 3 * se
        ok &= r["ok"] and bound_ok
        lines.append(f"n={n}: g_next {r['g_next']:.4f} >= rhs {r['rhs']:.4f} - 3*{r['se']:.4f}, f {f:.4f} <= {upper_bound(t):.4f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 600
    record(9, ok, f"closed forms {'ok' if hand else 'wrong'}; " + "; ".join(lines) + f"; {elapsed:.0f}s")


def test_criterion_10_determinism(tmp_path):
    runs = {
        "delta-scan": ["--n", "8,12", "--delta", "0:0.5:0.25", "--replicas", "200", "--seed", "3"],
        "fire-stats": ["--model", "eta", "--n", "16", "--m", "3", "--lambda", "0.1,0.03", "--t", "1.2", "--replicas", "100", "--seed", "4"],
        "tree-stats": ["--n", "6", "--lambda", "0.01", "--t", "0.8,1.2", "--replicas", "300", "--seed", "5"],
    }
    same = 0
    for cmd, flags in runs.items():
        bodies = set()
        for tag, workers in (("a", "1"), ("b", "2"), ("c", "1")):
            out = tmp_path / f"{cmd}-{tag}"
            assert cli_run([cmd, *flags, "--workers", workers, "--out", str(out), "--no-plot"]) == 0
            bodies.add((out / "results.csv").read_bytes())
        same += len(bodies) == 1
    record(10, same == len(runs), f"{same}/{len(runs)} experiments byte-identical across re-runs and worker counts 1, 2")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
