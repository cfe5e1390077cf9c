"""Binomial estimates with Wilson intervals, and mergeable replica tallies."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

Z95 = 1.959963984540054


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    z2n = z * z / trials
    centre = (p + z2n / 2) / (1 + z2n)
    half = z * math.sqrt(p * (1 - p) / trials + z2n / (4 * trials)) / (1 + z2n)
    return max(0.0, min(p, centre - half)), min(1.0, max(p, centre + half))


@dataclass(frozen=True)
class Estimate:
    value: float
    trials: int
    lo: float
    hi: float
    seed: int | None = None

    @classmethod
    def from_counts(cls, successes: int, trials: int, seed: int | None = None) -> Estimate:
        lo, hi = wilson_interval(successes, trials)
        value = successes / trials if trials else math.nan
        return cls(value, trials, lo, hi, seed)

    @property
    def successes(self) -> int:
        return round(self.value * self.trials) if self.trials else 0

    @property
    def se(self) -> float:
        if not self.trials:
            return math.nan
        return math.sqrt(self.value * (1 - self.value) / self.trials)


def mean_se(values) -> tuple[float, float]:
    """Sample mean and its standard error."""
    n = len(values)
    if n == 0:
        return math.nan, math.nan
    m = math.fsum(values) / n
    if n == 1:
        return m, 0.0
    var = math.fsum((v - m) ** 2 for v in values) / (n - 1)
    return m, math.sqrt(var / n)


@dataclass
class ReplicaStats:
    """Success counts over a set of replicas at one parameter point.

    ``counts`` maps event names to numbers of replicas where the event held;
    ``samples`` keeps finite per-replica observations (e.g. first fire times), sorted.
    """

    experiment: str
    params: dict
    trials: int = 0
    counts: dict = field(default_factory=dict)
    samples: tuple = ()
    seed: int | None = None

    @classmethod
    def from_replicas(cls, experiment: str, params: dict, outcomes, samples=(), seed=None) -> ReplicaStats:
        """``outcomes`` is a sequence of dicts ``event name -> bool``, one per replica."""
        counts: dict = {}
        trials = 0
        for o in outcomes:
            trials += 1
            for k, v in o.items():
                counts[k] = counts.get(k, 0) + int(bool(v))
        return cls(experiment, dict(params), trials, counts, tuple(sorted(s for s in samples if math.isfinite(s))), seed)

    def estimate(self, name: str) -> Estimate:
        return Estimate.from_counts(self.counts.get(name, 0), self.trials, self.seed)


def merge(a: ReplicaStats, b: ReplicaStats) -> ReplicaStats:
    """Combine tallies of two disjoint replica sets at the same parameter point."""
    if a.experiment != b.experiment or a.params != b.params:
        raise ValueError(f"cannot merge {a.experiment}{a.params} with {b.experiment}{b.params}")
    counts = dict(a.counts)
    for k, v in b.counts.items():
        counts[k] = counts.get(k, 0) + v
    if not b.trials:
        seed = a.seed
    elif not a.trials:
        seed = b.seed
    else:
        seed = a.seed if a.seed == b.seed else None
    return ReplicaStats(a.experiment, dict(a.params), a.trials + b.trials, counts, tuple(sorted(a.samples + b.samples)), seed)
