"""Event logs of single trajectories and their CSV form.

File layout: one ``#``-prefixed JSON header line, then CSV with columns
``time,site_x,site_y,type``. Tree logs write the node as its heap index in
binary (root ``1``, children ``10`` and ``11``) in ``site_x`` and leave
``site_y`` empty. Times are written with ``repr`` so they round-trip exactly.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .lattice import NN, Region, Site

TYPE_NAMES = ("grow", "ignite", "burn")
GROW, IGNITE, BURN = 0, 1, 2
TREE_MODELS = ("zeta",)


@dataclass
class EventLog:
    header: dict
    time: np.ndarray
    x: np.ndarray
    y: np.ndarray
    type: np.ndarray
    _region: Region | None = field(default=None, repr=False, compare=False)

    @classmethod
    def empty(cls, header: dict) -> EventLog:
        return cls(header, np.empty(0), np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64), np.empty(0, dtype=np.uint8))

    @property
    def model(self) -> str:
        return self.header["model"]

    @property
    def is_tree(self) -> bool:
        return self.model in TREE_MODELS

    @property
    def region(self) -> Region | None:
        if self._region is None and "region" in self.header:
            self._region = Region.from_dict(self.header["region"])
        return self._region

    def __len__(self) -> int:
        return int(self.time.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventLog):
            return NotImplemented
        return self.header == other.header and all(
            np.array_equal(getattr(self, a), getattr(other, a)) for a in ("time", "x", "y", "type")
        )

    def records(self):
        """Iterate ``(time, site, type name)``; tree sites are heap indices."""
        for t, x, y, k in zip(self.time.tolist(), self.x.tolist(), self.y.tolist(), self.type.tolist()):
            yield t, (x if self.is_tree else Site(x, y)), TYPE_NAMES[k]

    def select(self, kind: int) -> np.ndarray:
        return np.flatnonzero(self.type == kind)

    def burns(self) -> EventLog:
        keep = self.type == BURN
        return EventLog(self.header, self.time[keep], self.x[keep], self.y[keep], self.type[keep], self._region)

    def state_at(self, t: float) -> np.ndarray:
        """Occupancy after every event at time <= t (lattice logs: region-shaped; tree: by heap index)."""
        sel = (self.time <= t) & (self.type != IGNITE)
        if self.is_tree:
            n = self.header["n"]
            state = np.zeros(2 ** (n + 1), dtype=np.uint8)
            cells = self.x[sel]
        else:
            region = self.region
            state = np.zeros(region.cells, dtype=np.uint8)
            cells = (self.y[sel] - region.y0) * region.width + (self.x[sel] - region.x0)
        values = (self.type[sel] == GROW).astype(np.uint8)
        # keep the last event per cell
        order = np.arange(cells.size)
        last = np.full(state.size, -1, dtype=np.int64)
        np.maximum.at(last, cells, order)
        hit = last >= 0
        state[hit] = values[last[hit]]
        return state if self.is_tree else state.reshape(self.region.shape)

    # -- serialization -------------------------------------------------------

    def write(self, fp) -> None:
        fp.write("# " + json.dumps(self.header, sort_keys=True) + "\n")
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(["time", "site_x", "site_y", "type"])
        if self.is_tree:
            for t, x, _, k in zip(self.time.tolist(), self.x.tolist(), self.y.tolist(), self.type.tolist()):
                w.writerow([repr(t), format(x, "b"), "", TYPE_NAMES[k]])
        else:
            for t, x, y, k in zip(self.time.tolist(), self.x.tolist(), self.y.tolist(), self.type.tolist()):
                w.writerow([repr(t), x, y, TYPE_NAMES[k]])

    def dumps(self) -> str:
        buf = io.StringIO()
        self.write(buf)
        return buf.getvalue()

    def save(self, path) -> None:
        with open(path, "w", newline="") as fp:
            self.write(fp)

    @classmethod
    def read(cls, fp) -> EventLog:
        first = fp.readline()
        if not first.startswith("#"):
            raise ValueError("event log must start with a '#' JSON header line")
        header = json.loads(first[1:])
        tree = header.get("model") in TREE_MODELS
        reader = csv.reader(fp)
        cols = next(reader)
        if cols != ["time", "site_x", "site_y", "type"]:
            raise ValueError(f"unexpected columns {cols}")
        times, xs, ys, types = [], [], [], []
        for row in reader:
            times.append(float(row[0]))
            if tree:
                xs.append(int(row[1], 2))
                ys.append(0)
            else:
                xs.append(int(row[1]))
                ys.append(int(row[2]))
            types.append(TYPE_NAMES.index(row[3]))
        return cls(
            header,
            np.array(times, dtype=float),
            np.array(xs, dtype=np.int64),
            np.array(ys, dtype=np.int64),
            np.array(types, dtype=np.uint8),
        )

    @classmethod
    def loads(cls, text: str) -> EventLog:
        return cls.read(io.StringIO(text))

    @classmethod
    def load(cls, path) -> EventLog:
        with open(Path(path), newline="") as fp:
            return cls.read(fp)


def validate(log: EventLog) -> None:
    """Check the structural invariants of a log; raises ``ValueError`` on the first violation.

    * times are nondecreasing and the log starts from the all-vacant state;
    * a grow hits a vacant site and a burn hits an occupied one;
    * for ``eta``, an ignition on an occupied site is followed, at the same time,
      by burns of exactly its occupied cluster, and nothing else burns;
    * for ``eta_L``, burns follow a grow that completes a cluster of size >= L;
    * for ``zeta``, an ignition burns exactly the occupied path toward the root.
    """
    if np.any(np.diff(log.time) < 0):
        raise ValueError("event times decrease")
    model = log.model
    recs = list(zip(log.time.tolist(), log.x.tolist(), log.y.tolist(), log.type.tolist()))
    tree = log.is_tree
    occupied: set = set()
    if not tree:
        region = log.region
        nbr_offsets = NN.offsets

    def cluster_of(v):
        seen = {v}
        stack = [v]
        while stack:
            x, y = stack.pop()
            for dx, dy in nbr_offsets:
                w = (x + dx, y + dy)
                if w in occupied and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    i = 0
    n = len(recs)
    while i < n:
        t, x, y, k = recs[i]
        v = x if tree else (x, y)
        if k == GROW:
            if v in occupied:
                raise ValueError(f"grow on occupied site {v} at t={t}")
            if not tree and not region.contains(v):
                raise ValueError(f"grow outside region at {v}")
            occupied.add(v)
            i += 1
            if model == "eta_L":
                burnt = []
                while i < n and recs[i][3] == BURN and recs[i][0] == t:
                    burnt.append((recs[i][1], recs[i][2]))
                    i += 1
                expected = cluster_of(v)
                if len(expected) >= log.header["L"]:
                    if set(burnt) != expected or len(burnt) != len(expected):
                        raise ValueError(f"cluster of size {len(expected)} at t={t} not burnt exactly")
                elif burnt:
                    raise ValueError(f"burn of a sub-threshold cluster at t={t}")
                occupied.difference_update(burnt)
            continue
        if k == IGNITE:
            i += 1
            burnt = []
            while i < n and recs[i][3] == BURN and recs[i][0] == t:
                burnt.append(recs[i][1] if tree else (recs[i][1], recs[i][2]))
                i += 1
            if v not in occupied:
                if burnt:
                    raise ValueError(f"burns after ignition of vacant site {v} at t={t}")
                continue
            if tree:
                expected = []
                u = v
                while u >= 1 and u in occupied:
                    expected.append(u)
                    u //= 2
            else:
                expected = cluster_of(v)
            if set(burnt) != set(expected) or len(burnt) != len(expected):
                raise ValueError(f"ignition at {v}, t={t}: burnt set differs from the occupied cluster")
            occupied.difference_update(burnt)
            continue
        raise ValueError(f"burn at t={t} not preceded by its cause")
