"""Monte Carlo pipelines.

Every replica is driven by one seed from :func:`forestfire.harness.replica_seeds`.
Sweeps reuse the same seed list at every parameter point (common random numbers),
so trends across parameters are measured on coupled samples: ignition clocks for
different rates are rescalings of one another, and the sprinkling uniforms of the
delta experiment are shared across delta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import _kernels as K
from .clocks import GROWTH, IGNITION, ClockStream, ScriptedClocks
from .clusters import (
    boxes_connected,
    has_vacant_star_circuit_mask,
    label_clusters,
    rect_crossing,
)
from .dynamics import (
    P_C,
    TrajectoryConfig,
    critical_time,
    run_eta,
    run_eta_L,
    run_xi,
    scales,
    scales_L,
    surrounding_removal,
)
from .eventlog import BURN, GROW, EventLog
from .harness import derive_seed, replica_seeds, run_replicas
from .lattice import NN, Region
from .stats import Estimate, ReplicaStats, mean_se
from .tree import TreeConfig, first_burn_time, recursion_rhs, run_zeta, upper_bound

# --------------------------------------------------------------------------
# destroy-and-sprinkle experiment


@dataclass(frozen=True)
class DeltaExperimentConfig:
    """Fill ``[0,4n] x [0,3n]`` at density ``p_c``, vacate everything joined to the
    boundary, sprinkle vacant sites with probability ``delta``, then ask for an
    occupied crossing of ``[n,3n] x [n,2n]``."""

    n: int
    delta: float
    p_c: float = P_C
    replicas: int = 1000
    seed: int = 0
    vertical: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")
        if not 0.0 <= self.p_c <= 1.0:
            raise ValueError(f"p_c must lie in [0, 1], got {self.p_c}")

    @property
    def box(self) -> Region:
        return delta_box(self.n)

    @property
    def target(self) -> Region:
        return delta_target(self.n)


def delta_box(n: int) -> Region:
    return Region.rect(0, 4 * n, 0, 3 * n)


def delta_target(n: int) -> Region:
    return Region.rect(n, 3 * n, n, 2 * n)


def delta_center(n: int) -> tuple[int, int]:
    return (2 * n, (3 * n) // 2)


@dataclass
class DeltaReplica:
    crossing: np.ndarray  # one per delta
    center_occupied: np.ndarray  # one per delta
    center_reached: bool  # centre initially joined to the boundary


def destroy_boundary_cluster(occupied: np.ndarray) -> np.ndarray:
    """Vacate every occupied site with an occupied nearest-neighbour path to the boundary."""
    labels, _ = label_clusters(occupied, NN)
    edge = np.concatenate((labels[0], labels[-1], labels[:, 0], labels[:, -1]))
    hit = np.unique(edge[edge > 0])
    return occupied & ~np.isin(labels, hit)


def delta_fields(n: int, p_fill: float, replica_seed: int):
    """(initial fill, configuration after destruction, sprinkling uniforms)."""
    box = delta_box(n)
    rng = np.random.default_rng(replica_seed)
    fill = rng.random(box.shape) < p_fill
    sprinkle = rng.random(box.shape)
    return fill, destroy_boundary_cluster(fill), sprinkle


def delta_outcomes(n: int, deltas, p_fill: float, replica_seed: int, vertical: bool = True) -> DeltaReplica:
    box, target = delta_box(n), delta_target(n)
    fill, after, sprinkle = delta_fields(n, p_fill, replica_seed)
    cx, cy = delta_center(n)
    cross = np.zeros(len(deltas), dtype=bool)
    centre = np.zeros(len(deltas), dtype=bool)
    for j, d in enumerate(deltas):
        final = after | (sprinkle < d)
        cross[j] = rect_crossing(final, box, target, vertical)
        centre[j] = final[cy, cx]
    return DeltaReplica(cross, centre, bool(fill[cy, cx] and not after[cy, cx]))


def delta_replica(cfg: DeltaExperimentConfig, replica_seed: int) -> bool:
    """One run of the three-stage experiment; True iff the target is crossed."""
    return bool(delta_outcomes(cfg.n, (cfg.delta,), cfg.p_c, replica_seed, cfg.vertical).crossing[0])


def estimate_p_n(cfg: DeltaExperimentConfig, workers: int | None = 1) -> Estimate:
    seeds = replica_seeds(cfg.seed, cfg.replicas)
    hits = run_replicas(partial(delta_replica, cfg), seeds, workers)
    return Estimate.from_counts(int(sum(hits)), len(hits), cfg.seed)


def _scan_replica(n, deltas, p_c, vertical, s):
    return delta_outcomes(n, deltas, p_c, s, vertical).crossing


def delta_scan(ns, deltas, p_c: float = P_C, replicas: int = 1000, seed: int = 0, vertical: bool = True, workers: int | None = 1) -> list[dict]:
    """Crossing probability on an (n, delta) grid; delta is coupled through shared uniforms."""
    deltas = tuple(float(d) for d in deltas)
    seeds = replica_seeds(seed, replicas)
    rows = []
    for n in ns:
        hits = np.array(run_replicas(partial(_scan_replica, int(n), deltas, p_c, vertical), seeds, workers))
        for j, d in enumerate(deltas):
            est = Estimate.from_counts(int(hits[:, j].sum()), replicas, seed)
            rows.append({"n": int(n), "delta": d, "estimate": est.value, "lo": est.lo, "hi": est.hi, "replicas": replicas, "seed": seed})
    return rows


def _centre_replica(n, deltas, p_c, s):
    r = delta_outcomes(n, deltas, p_c, s)
    return r.center_occupied, r.center_reached


def center_occupancy_check(n: int, deltas, p_c: float = P_C, replicas: int = 10000, seed: int = 0, workers: int | None = 1) -> list[dict]:
    """Compare the centre's final occupancy with ``p_c - P + (1 - p_c + P) * delta``.

    ``P`` (the chance the centre is joined to the boundary in the fill) is estimated
    on an independent replica set.
    """
    deltas = tuple(float(d) for d in deltas)
    seeds = replica_seeds(seed, 2 * replicas)
    obs = run_replicas(partial(_centre_replica, n, deltas, p_c), seeds[:replicas], workers)
    ref = run_replicas(partial(_centre_replica, n, (0.0,), p_c), seeds[replicas:], workers)
    occ = np.array([o[0] for o in obs])
    reach = Estimate.from_counts(sum(r[1] for r in ref), replicas, seed)
    rows = []
    for j, d in enumerate(deltas):
        o = Estimate.from_counts(int(occ[:, j].sum()), replicas, seed)
        predicted = p_c - reach.value + (1 - p_c + reach.value) * d
        se = math.hypot(o.se, (1 - d) * reach.se)
        rows.append(
            {
                "n": n,
                "delta": d,
                "observed": o.value,
                "predicted": predicted,
                "reach": reach.value,
                "se": se,
                "ok": abs(o.value - predicted) <= 3 * se,
            }
        )
    return rows


# --------------------------------------------------------------------------
# fire statistics


MODELS = ("eta", "eta_L", "zeta")


@dataclass(frozen=True)
class FireStatConfig:
    model: str
    n: int
    m: int
    t: float
    lam: float | None = None
    L: int | None = None
    replicas: int = 1000
    seed: int = 0
    p_c: float = P_C

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.m > self.n:
            raise ValueError(f"observation radius m={self.m} exceeds n={self.n}")
        if self.m < 0:
            raise ValueError(f"m must be >= 0, got {self.m}")
        if self.model == "eta_L":
            if self.L is None or self.lam is not None:
                raise ValueError("eta_L takes L and no lambda")
        elif self.lam is None or self.L is not None:
            raise ValueError(f"{self.model} takes lambda and no L")

    def trajectory(self, seed: int):
        if self.model == "zeta":
            return TreeConfig(self.n, self.lam, self.t, seed)
        return TrajectoryConfig(n=self.n, horizon=self.t, seed=seed, lam=self.lam, L=self.L, p_c=self.p_c)

    def params(self) -> dict:
        d = {"model": self.model, "n": self.n, "m": self.m, "t": self.t, "p_c": self.p_c}
        d["lambda" if self.lam is not None else "L"] = self.lam if self.lam is not None else self.L
        return d


def simulate(cfg, clocks=None) -> EventLog:
    if isinstance(cfg, TreeConfig):
        return run_zeta(cfg, clocks)
    return run_eta(cfg, clocks) if cfg.lam is not None else run_eta_L(cfg, clocks)


def _observed(log: EventLog, m: int) -> np.ndarray:
    if log.is_tree:
        return log.x < 2 ** (m + 1)
    return (np.abs(log.x) <= m) & (np.abs(log.y) <= m)


@dataclass(frozen=True)
class FireSummary:
    fire: bool
    two_fires: bool
    tau: float


def fire_summary(log: EventLog, m: int, t: float, after: float = -math.inf) -> FireSummary:
    """Fires (burn instants) in B(m) -- or T(m) for tree logs -- during ``(after, t]``.

    Two burns at the same instant are one fire; two fires need two distinct times
    (the sites may coincide). ``tau`` is the first fire time, inf if none.
    """
    sel = (log.type == BURN) & (log.time <= t) & (log.time > after) & _observed(log, m)
    times = np.unique(log.time[sel])
    return FireSummary(times.size >= 1, times.size >= 2, float(times[0]) if times.size else math.inf)


def _fire_replica(cfg: FireStatConfig, s: int) -> FireSummary:
    return fire_summary(simulate(cfg.trajectory(s)), cfg.m, cfg.t)


@dataclass
class FireStats:
    one: Estimate
    two: Estimate
    taus: np.ndarray
    stats: ReplicaStats = field(repr=False)


def fire_outcomes(cfg: FireStatConfig, workers: int | None = 1) -> list[FireSummary]:
    """Per-replica fire summaries, in replica-seed order."""
    return run_replicas(partial(_fire_replica, cfg), replica_seeds(cfg.seed, cfg.replicas), workers)


def fire_stats(cfg: FireStatConfig, workers: int | None = 1) -> FireStats:
    """Probabilities of at least one and at least two fires in B(m) by time t, and first-fire times."""
    res = fire_outcomes(cfg, workers)
    taus = np.array([r.tau for r in res])
    stats = ReplicaStats.from_replicas(
        "fire-stats", cfg.params(), ({"fire": r.fire, "two_fires": r.two_fires} for r in res), taus, cfg.seed
    )
    return FireStats(stats.estimate("fire"), stats.estimate("two_fires"), taus[np.isfinite(taus)], stats)


# --------------------------------------------------------------------------
# fire at the origin versus the pure-growth cluster of the origin


@dataclass
class BoundReport:
    t: float
    lhs: float
    lhs_se: float
    rhs: float
    rhs_se: float
    replicas: int
    origin_burns: int
    necessary_violations: int

    @property
    def combined_se(self) -> float:
        return math.hypot(self.lhs_se, self.rhs_se)

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + 3 * self.combined_se


def bound_terms(cfg: TrajectoryConfig, times, clocks=None) -> list[tuple[bool, float, bool]]:
    """Per evaluation time: (origin burnt by t, bound term, necessary condition held).

    The bound term is 1 if the pure-growth cluster of the origin at ``t`` reaches
    the boundary of the box, and ``1 - exp(-lam * t * |C|)`` otherwise. The necessary
    condition is that if the origin burnt, some site of that cluster had an
    ignition ring by ``t``.
    """
    region = cfg.box
    clocks = ClockStream(cfg.seed, cfg.lam) if clocks is None else clocks
    log = run_eta(TrajectoryConfig(cfg.n, max(times), cfg.seed, lam=cfg.lam, p_c=cfg.p_c, region=region), clocks)
    origin_burns = log.time[(log.type == BURN) & (log.x == 0) & (log.y == 0)]
    grow = clocks.first_times(region, GROWTH).ravel()
    ignite = clocks.first_times(region, IGNITION).ravel()
    edge = np.zeros(region.shape, dtype=bool)
    edge[0, :] = edge[-1, :] = edge[:, 0] = edge[:, -1] = True
    edge = edge.ravel()
    nbr = region.neighbor_table(NN)
    origin = region.index((0, 0))
    out = []
    for t in times:
        burnt = bool(np.any(origin_burns <= t))
        cluster = K.flood(grow <= t, nbr, origin)
        size = int(cluster.sum())
        if np.any(cluster & edge):
            term = 1.0
        else:
            term = -math.expm1(-cfg.lam * t * size)
        necessary = (not burnt) or bool(np.any(ignite[cluster] <= t))
        out.append((burnt, term, necessary))
    return out


def _bound_replica(n, lam, times, p_c, s):
    return bound_terms(TrajectoryConfig(n, max(times), s, lam=lam, p_c=p_c), times)


def bound_check(cfg: FireStatConfig, times=None, workers: int | None = 1) -> list[BoundReport]:
    """Estimate P(origin burns before t) and the pure-growth bound on the same replicas.

    The infinite-cluster probability is replaced by the chance that the origin's
    cluster reaches the box boundary, which can only overstate it.
    """
    if cfg.model != "eta" or cfg.m != 0:
        raise ValueError("bound_check needs model 'eta' and m = 0")
    times = tuple(float(t) for t in (times if times is not None else (cfg.t,)))
    seeds = replica_seeds(cfg.seed, cfg.replicas)
    res = run_replicas(partial(_bound_replica, cfg.n, cfg.lam, times, cfg.p_c), seeds, workers)
    reports = []
    for j, t in enumerate(times):
        burnt = [r[j][0] for r in res]
        terms = [r[j][1] for r in res]
        lhs = Estimate.from_counts(sum(burnt), len(res))
        rhs, rhs_se = mean_se(terms)
        reports.append(
            BoundReport(t, lhs.value, lhs.se, rhs, rhs_se, len(res), sum(burnt), sum(not r[j][2] for r in res))
        )
    return reports


# --------------------------------------------------------------------------
# removal-at-t_c process: crossing probe


def xi_crossing(i: int, eps: float, replica_seed: int, p_c: float = P_C) -> bool:
    region = Region.box(5 * 3**i)
    grid = run_xi(replica_seed, region, critical_time(p_c) + eps, p_c)
    return boxes_connected(grid.occupied, region, 3**i, 3 * 3**i)


def xi_crossing_probe(i: int, eps: float, replicas: int = 1000, seed: int = 0, p_c: float = P_C, workers: int | None = 1) -> Estimate:
    """P(boundary of B(3^i) joined to boundary of B(3^(i+1)) in xi(t_c + eps))."""
    if i <= 0 or i % 2:
        raise ValueError(f"i must be a positive even integer, got {i}")
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    seeds = replica_seeds(seed, replicas)
    hits = run_replicas(partial(xi_crossing, i, eps, p_c=p_c), seeds, workers)
    return Estimate.from_counts(int(sum(hits)), replicas, seed)


# --------------------------------------------------------------------------
# the events B1, B2, B3 and their consequences


def _annulus_between(sc) -> Region:
    k, K_ = sc.k_radius, sc.K_radius
    if k >= K_:
        raise ValueError(f"inner radius {sc.k:.3f} and outer radius {sc.K:.3f} leave no annulus")
    return Region.ring(k, K_)


def no_ignition(clocks, radius: int, until: float, strict: bool = False) -> bool:
    """No ignition ring in B(radius) at time <= until (< until if ``strict``)."""
    first = clocks.first_times(Region.box(radius), IGNITION)
    return not bool(np.any(first < until if strict else first <= until))


def vacant_circuit_at_tc(clocks, ring: Region, p_c: float = P_C) -> bool:
    """Does pure growth at t_c have a vacant *-circuit around the origin in ``ring``?"""
    occupied = clocks.first_times(ring, GROWTH) <= critical_time(p_c)
    return has_vacant_star_circuit_mask(occupied, ring)


def first_fire(log: EventLog, m: int) -> float:
    return fire_summary(log, m, math.inf).tau


def event_probes(log: EventLog, m: int, clocks=None, eps: float | None = None) -> dict:
    """Evaluate B1 and B2 (``eta`` logs) or B3 (``eta_L`` logs) on one trajectory.

    ``tau`` is the first fire time in B(m); when there is none B1 is checked up to
    the horizon. With ``eps`` given, ``B1_tilde`` (no ignition in B(K) before
    t_c + eps) is reported as well.
    """
    h = log.header
    p_c = h.get("p_c", P_C)
    tau = first_fire(log, m)
    out = {"tau": tau}
    if log.model == "eta":
        clocks = ClockStream(h["seed"], h["lambda"]) if clocks is None else clocks
        sc = scales(h["lambda"])
        ring = _annulus_between(sc)
        out["B1"] = no_ignition(clocks, sc.K_radius, min(tau, h["t"]))
        out["B2"] = vacant_circuit_at_tc(clocks, ring, p_c)
        if eps is not None:
            out["B1_tilde"] = no_ignition(clocks, sc.K_radius, critical_time(p_c) + eps, strict=True)
    elif log.model == "eta_L":
        clocks = ClockStream(h["seed"]) if clocks is None else clocks
        out["B3"] = vacant_circuit_at_tc(clocks, _annulus_between(scales_L(h["L"])), p_c)
    else:
        raise ValueError(f"no events defined for model {log.model!r}")
    return out


def with_vacant_circuit(base: ClockStream, radius: int, horizon: float, p_c: float = P_C) -> ScriptedClocks:
    """Clocks equal to ``base`` except that every site at L-infinity distance ``radius``
    has its growth rings delayed by t_c, so pure growth at t_c has a vacant circuit there.

    A vacant *-circuit around the origin is rare at desk scale; conditioning on one this
    way lets the pathwise statements that assume it be exercised.
    """
    t_c = critical_time(p_c)
    ring = Region.ring(radius - 1, radius) if radius > 0 else Region.box(0)
    script = {(v, GROWTH): base.times_until(v, GROWTH, horizon) + t_c for v in ring.sites()}
    return ScriptedClocks(script, base)


def _xi_pieces(clocks, region: Region, p_c: float):
    t_c = critical_time(p_c)
    first = clocks.first_times(region, GROWTH)
    removed, _ = surrounding_removal(first <= t_c, region)
    again = clocks.first_times_after(region, t_c, GROWTH) if removed.any() else np.full(region.shape, np.inf)
    return first, removed, again


def _xi_at(pieces, s: float, t_c: float) -> np.ndarray:
    first, removed, again = pieces
    if s < t_c:
        return first <= s
    return np.where(removed, again <= s, first <= s)


def coupling_check(log: EventLog, m: int, clocks=None) -> dict:
    """Test ``eta_v(t) <= xi_v(t)`` for all ``t > tau`` and ``v`` in ``B(k) minus B(m)``.

    Applies only when B1 and B2 hold (B3 for ``eta_L``) and a fire in B(m) occurred.
    Between events ``eta`` can only rise at growth rings and ``xi`` can only fall at
    ``t_c``, so it suffices to compare at ``tau``, at ``t_c`` (if later) and at every
    growth after ``tau``.
    """
    h = log.header
    p_c = h.get("p_c", P_C)
    t_c = critical_time(p_c)
    probes = event_probes(log, m, clocks)
    tau = probes["tau"]
    if log.model == "eta":
        sc = scales(h["lambda"])
        ok = probes["B1"] and probes["B2"]
        clocks = ClockStream(h["seed"], h["lambda"]) if clocks is None else clocks
    else:
        sc = scales_L(h["L"])
        ok = probes["B3"]
        clocks = ClockStream(h["seed"]) if clocks is None else clocks
    result = {"applicable": bool(ok and math.isfinite(tau)), "violations": 0, "tau": tau}
    if not result["applicable"]:
        return result
    region = log.region
    linf = region.linf()
    window = region.mask & (linf <= sc.k_radius) & (linf > m)
    pieces = _xi_pieces(clocks, region, p_c)
    horizon = h["t"]
    violations = int(np.sum(log.state_at(tau).astype(bool) & ~_xi_at(pieces, tau, t_c) & window))
    if tau < t_c <= horizon:
        violations += int(np.sum(log.state_at(t_c).astype(bool) & ~_xi_at(pieces, t_c, t_c) & window))
    # afterwards only the growing site changes
    first, removed, again = pieces
    later = np.flatnonzero((log.type == GROW) & (log.time > tau))
    for j in later.tolist():
        s = log.time[j]
        r, c = log.y[j] - region.y0, log.x[j] - region.x0
        if not window[r, c]:
            continue
        xi_v = (again[r, c] <= s) if (s >= t_c and removed[r, c]) else (first[r, c] <= s)
        violations += int(not xi_v)
    result["violations"] = violations
    return result


def consequence_check(log: EventLog, m: int, eps: float, clocks=None) -> dict:
    """On B1_tilde and B2 with two fires in B(m) during (t_c, t_c + eps), xi(t_c + eps)
    must join the boundary of B(m) to that of B(k)."""
    h = log.header
    p_c = h.get("p_c", P_C)
    t_c = critical_time(p_c)
    if log.model != "eta":
        raise ValueError("consequence_check applies to eta logs")
    clocks = ClockStream(h["seed"], h["lambda"]) if clocks is None else clocks
    probes = event_probes(log, m, clocks, eps=eps)
    sc = scales(h["lambda"])
    window_fires = fire_summary(log, m, t_c + eps, after=t_c)
    applicable = probes["B1_tilde"] and probes["B2"] and window_fires.two_fires and t_c + eps <= h["t"]
    out = {"applicable": bool(applicable), "holds": True}
    if applicable:
        region = Region.box(max(sc.k_radius, 5 * 9))
        xi = run_xi(h["seed"], region, t_c + eps, p_c, clocks)
        out["holds"] = boxes_connected(xi.occupied, region, m, sc.k_radius)
    return out


# --------------------------------------------------------------------------
# binary tree


def _tree_replica(n, lam, horizon, node, s):
    return first_burn_time(run_zeta(TreeConfig(n, lam, horizon, s)), node)


def tree_first_burns(n: int, lam: float, horizon: float, replicas: int, seed: int, node: int = 1, workers: int | None = 1) -> np.ndarray:
    """First burn time of ``node`` (default the root) in T(n), one per replica; inf if none."""
    seeds = replica_seeds(seed, replicas)
    return np.array(run_replicas(partial(_tree_replica, n, lam, horizon, node), seeds, workers))


def level_seed(seed: int, n: int) -> int:
    """Master seed for tree depth ``n``; distinct depths get independent replica sets."""
    return derive_seed(seed, f"tree-level-{n}")


def tree_stats(ns, lam: float, ts, replicas: int = 1000, seed: int = 0, workers: int | None = 1) -> list[dict]:
    """Estimated P(root burns by t) on T(n), beside the limit bounds."""
    ts = tuple(float(t) for t in ts)
    rows = []
    for n in ns:
        burns = tree_first_burns(int(n), lam, max(ts), replicas, level_seed(seed, int(n)), workers=workers)
        for t in ts:
            est = Estimate.from_counts(int(np.sum(burns <= t)), replicas, seed)
            ub = upper_bound(t)
            rows.append(
                {"n": int(n), "lambda": lam, "t": t, "estimate": est.value, "lo": est.lo, "hi": est.hi,
                 "se": est.se, "upper_bound": ub, "lower_bound": ub / 2, "replicas": replicas, "seed": seed}
            )
    return rows


def recursion_check(n: int, lam: float, t_tilde: float, t: float, replicas: int = 10000, seed: int = 0, workers: int | None = 1) -> dict:
    """Compare the estimated window probability at depth n+1 with the one-step bound
    built from depth-n estimates (independent replica sets per depth)."""
    if not 0 < t_tilde < t:
        raise ValueError("need 0 < t_tilde < t")
    lo = tree_first_burns(n, lam, t, replicas, level_seed(seed, n), workers=workers)
    hi = tree_first_burns(n + 1, lam, t, replicas, level_seed(seed, n + 1), workers=workers)
    g_n = float(np.mean((lo > t_tilde) & (lo <= t)))
    f_n = float(np.mean(lo <= t_tilde))
    g_next = float(np.mean((hi > t_tilde) & (hi <= t)))
    rhs = recursion_rhs(g_n, f_n, t_tilde, lam)
    c = (1 - math.exp(-t_tilde)) * math.exp(-lam * t_tilde)
    dg = c * (2 * g_n + 2 * (1 - f_n))
    df = -2 * c * g_n
    N = replicas
    var_rhs = (dg * dg * g_n * (1 - g_n) + df * df * f_n * (1 - f_n) - 2 * dg * df * g_n * f_n) / N
    se = math.sqrt(g_next * (1 - g_next) / N + max(var_rhs, 0.0))
    return {
        "n": n, "lambda": lam, "t_tilde": t_tilde, "t": t, "g_n": g_n, "f_n": f_n, "g_next": g_next,
        "rhs": rhs, "se": se, "ok": g_next >= rhs - 3 * se, "replicas": replicas,
    }
