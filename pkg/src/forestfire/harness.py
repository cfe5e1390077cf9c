"""Seeding discipline, replica orchestration and run manifests."""
from __future__ import annotations

import hashlib
import json
import math
import os
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .dynamics import P_C, critical_time
from .stats import ReplicaStats, merge

SEED_RULE = "blake2b-64(key=master seed as 16-byte signed little-endian, msg=replica index as 8-byte little-endian); repeats skipped"

__all__ = ["RunManifest", "ReplicaStats", "derive_seed", "merge", "replica_seeds", "resolve_workers", "run_replicas"]


def _derive(master: int, index: int) -> int:
    h = hashlib.blake2b(index.to_bytes(8, "little"), digest_size=8, key=int(master).to_bytes(16, "little", signed=True))
    return int.from_bytes(h.digest(), "little")


def replica_seeds(master_seed: int, count: int) -> list[int]:
    """``count`` distinct 64-bit seeds derived from ``master_seed``.

    Seed ``j`` depends only on ``(master_seed, j)``, so longer lists extend shorter ones.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    out: list[int] = []
    seen: set[int] = set()
    index = 0
    while len(out) < count:
        s = _derive(master_seed, index)
        index += 1
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get("PYRO_WORKERS")
        workers = int(env) if env else 1
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    return workers


def run_replicas(fn, seeds, workers: int | None = 1) -> list:
    """Apply ``fn`` to every seed; results come back in seed order whatever the worker count."""
    seeds = list(seeds)
    workers = resolve_workers(workers)
    if workers == 1 or len(seeds) < 2:
        return [fn(s) for s in seeds]
    chunk = max(1, len(seeds) // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seeds, chunksize=chunk))


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)


@dataclass
class RunManifest:
    """Everything needed to reproduce a run, plus wall-clock metadata.

    The hash covers the reproducible part only (not timing, worker count or paths),
    so it is identical for re-runs of the same configuration.
    """

    experiment: str
    params: dict
    master_seed: int
    replicas: int
    p_c: float = P_C
    t_c: float = field(default=None)
    seed_rule: str = SEED_RULE
    code_version: str = __version__
    outputs: list = field(default_factory=list)
    workers: int = 1
    started: float = field(default_factory=time.time)
    finished: float | None = None

    def __post_init__(self):
        expected = critical_time(self.p_c)
        if self.t_c is None:
            self.t_c = expected
        elif not math.isclose(self.t_c, expected, rel_tol=0, abs_tol=1e-12):
            raise ValueError(f"t_c={self.t_c} inconsistent with p_c={self.p_c} (expected {expected})")

    def reproducible(self) -> dict:
        return {
            "experiment": self.experiment,
            "params": self.params,
            "master_seed": self.master_seed,
            "replicas": self.replicas,
            "seed_rule": self.seed_rule,
            "constants": {"p_c": self.p_c, "t_c": self.t_c},
            "code_version": self.code_version,
        }

    @property
    def hash(self) -> str:
        return hashlib.sha256(_canonical(self.reproducible()).encode()).hexdigest()

    def to_dict(self) -> dict:
        d = self.reproducible()
        d["manifest_hash"] = self.hash
        d["outputs"] = list(self.outputs)
        d["wall_clock"] = {
            "started": self.started,
            "finished": self.finished,
            "seconds": None if self.finished is None else self.finished - self.started,
            "workers": self.workers,
            "host": platform.node(),
            "python": platform.python_version(),
        }
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> RunManifest:
        m = cls(
            experiment=d["experiment"],
            params=d["params"],
            master_seed=d["master_seed"],
            replicas=d["replicas"],
            p_c=d["constants"]["p_c"],
            t_c=d["constants"]["t_c"],
            seed_rule=d.get("seed_rule", SEED_RULE),
            code_version=d.get("code_version", __version__),
        )
        if "manifest_hash" in d and d["manifest_hash"] != m.hash:
            raise ValueError("manifest hash does not match its contents")
        return m


def derive_seed(master: int, tag: str) -> int:
    """A 64-bit seed keyed by ``master`` and a text tag, independent of the replica seeds."""
    h = hashlib.blake2b(tag.encode(), digest_size=8, key=int(master).to_bytes(16, "little", signed=True), person=b"tag")
    return int.from_bytes(h.digest(), "little")
