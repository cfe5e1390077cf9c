"""Square-lattice geometry: boxes, rectangles, annuli and the two adjacency relations.

Sites are addressed by integer coordinates ``(x, y)`` at the API edges. Inside a
region every site is a packed row-major index into the region's bounding
rectangle, ``(y - y0) * width + (x - x0)``; all simulation kernels work on those
indices.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import NamedTuple

import numpy as np


class Site(NamedTuple):
    x: int
    y: int


class Adjacency(str, Enum):
    NEAREST_NEIGHBOR = "nearest_neighbor"
    STAR = "star"

    @property
    def offsets(self) -> tuple[tuple[int, int], ...]:
        if self is Adjacency.NEAREST_NEIGHBOR:
            return _NN_OFFSETS
        return _STAR_OFFSETS


NN = Adjacency.NEAREST_NEIGHBOR
STAR = Adjacency.STAR

# E, W, N, S, then the diagonals NE, NW, SW, SE. Fixed once: trajectories depend on it.
_NN_OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1))
_STAR_OFFSETS = _NN_OFFSETS + ((1, 1), (-1, 1), (-1, -1), (1, -1))


@dataclass(frozen=True)
class Region:
    """A finite set of lattice sites.

    ``kind`` is one of ``box``, ``rect``, ``ring`` or ``annulus``. Rings are
    ``B(outer) minus B(hole)``; ``annulus(i)`` is the ring ``B(5*3**i) minus B(3**i)``.
    """

    kind: str
    x0: int
    x1: int
    y0: int
    y1: int
    hole: int = -1
    level: int | None = None

    @classmethod
    def box(cls, n: int) -> Region:
        if n < 0:
            raise ValueError(f"box radius must be >= 0, got {n}")
        return cls("box", -n, n, -n, n)

    @classmethod
    def rect(cls, x0: int, x1: int, y0: int, y1: int) -> Region:
        if x1 < x0 or y1 < y0:
            raise ValueError(f"empty rectangle [{x0},{x1}]x[{y0},{y1}]")
        return cls("rect", x0, x1, y0, y1)

    @classmethod
    def ring(cls, hole: int, outer: int) -> Region:
        if hole < 0 or outer <= hole:
            raise ValueError(f"ring needs 0 <= hole < outer, got hole={hole}, outer={outer}")
        return cls("ring", -outer, outer, -outer, outer, hole=hole)

    @classmethod
    def annulus(cls, i: int) -> Region:
        if i <= 0 or i % 2:
            raise ValueError(f"annulus index must be a positive even integer, got {i}")
        r = 3**i
        return cls("annulus", -5 * r, 5 * r, -5 * r, 5 * r, hole=r, level=i)

    @property
    def is_ring(self) -> bool:
        return self.hole >= 0

    @property
    def radius(self) -> int:
        """L-infinity radius of the bounding box (only meaningful for centred regions)."""
        return max(-self.x0, self.x1, -self.y0, self.y1)

    @property
    def width(self) -> int:
        return self.x1 - self.x0 + 1

    @property
    def height(self) -> int:
        return self.y1 - self.y0 + 1

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def cells(self) -> int:
        return self.width * self.height

    @cached_property
    def xs(self) -> np.ndarray:
        """x coordinate of every cell of the bounding rectangle, shape ``self.shape``."""
        return np.broadcast_to(np.arange(self.x0, self.x1 + 1), self.shape)

    @cached_property
    def ys(self) -> np.ndarray:
        return np.broadcast_to(np.arange(self.y0, self.y1 + 1)[:, None], self.shape)

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.ones(self.shape, dtype=bool)
        if self.is_ring:
            m &= np.maximum(np.abs(self.xs), np.abs(self.ys)) > self.hole
        m.setflags(write=False)
        return m

    @cached_property
    def indices(self) -> np.ndarray:
        """Packed indices of the sites of the region, ascending."""
        return np.flatnonzero(self.mask.ravel())

    @property
    def size(self) -> int:
        return int(self.indices.size)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def contains(self, v) -> bool:
        x, y = v
        if not (self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1):
            return False
        return not self.is_ring or max(abs(x), abs(y)) > self.hole

    def index(self, v) -> int:
        if not self.contains(v):
            raise ValueError(f"site {tuple(v)} is outside {self}")
        return (v[1] - self.y0) * self.width + (v[0] - self.x0)

    def site(self, index: int) -> Site:
        y, x = divmod(int(index), self.width)
        return Site(x + self.x0, y + self.y0)

    def sites(self) -> list[Site]:
        return [self.site(i) for i in self.indices]

    def linf(self) -> np.ndarray:
        """L-infinity norm of every cell of the bounding rectangle."""
        return np.maximum(np.abs(self.xs), np.abs(self.ys))

    def contains_region(self, other: Region) -> bool:
        if not (self.x0 <= other.x0 and other.x1 <= self.x1 and self.y0 <= other.y0 and other.y1 <= self.y1):
            return False
        if not self.is_ring:
            return True
        sub = self.mask[other.y0 - self.y0 : other.y1 - self.y0 + 1, other.x0 - self.x0 : other.x1 - self.x0 + 1]
        return bool(np.all(sub[other.mask]))

    def neighbor_table(self, adj: Adjacency = NN) -> np.ndarray:
        return _neighbor_table(self, Adjacency(adj))

    def __repr__(self) -> str:
        if self.kind == "box":
            return f"Region.box({self.x1})"
        if self.kind == "annulus":
            return f"Region.annulus({self.level})"
        if self.kind == "ring":
            return f"Region.ring({self.hole}, {self.x1})"
        return f"Region.rect({self.x0}, {self.x1}, {self.y0}, {self.y1})"

    def to_dict(self) -> dict:
        if self.kind == "box":
            return {"kind": "box", "n": self.x1}
        if self.kind == "annulus":
            return {"kind": "annulus", "i": self.level}
        if self.kind == "ring":
            return {"kind": "ring", "hole": self.hole, "outer": self.x1}
        return {"kind": "rect", "x0": self.x0, "x1": self.x1, "y0": self.y0, "y1": self.y1}

    @classmethod
    def from_dict(cls, d: dict) -> Region:
        kind = d["kind"]
        if kind == "box":
            return cls.box(d["n"])
        if kind == "annulus":
            return cls.annulus(d["i"])
        if kind == "ring":
            return cls.ring(d["hole"], d["outer"])
        return cls.rect(d["x0"], d["x1"], d["y0"], d["y1"])


_TABLES: dict[tuple[Region, Adjacency], np.ndarray] = {}


def _neighbor_table(region: Region, adj: Adjacency) -> np.ndarray:
    key = (region, adj)
    table = _TABLES.get(key)
    if table is not None:
        return table
    h, w = region.shape
    mask = region.mask
    table = np.full((h * w, len(adj.offsets)), -1, dtype=np.int64)
    rows, cols = np.nonzero(mask)
    for k, (dx, dy) in enumerate(adj.offsets):
        r2, c2 = rows + dy, cols + dx
        ok = (r2 >= 0) & (r2 < h) & (c2 >= 0) & (c2 < w)
        ok[ok] = mask[r2[ok], c2[ok]]
        table[(rows * w + cols)[ok], k] = (r2 * w + c2)[ok]
    table.setflags(write=False)
    if len(_TABLES) > 64:
        _TABLES.clear()
    _TABLES[key] = table
    return table


def neighbors(v, adj: Adjacency, region: Region) -> list[Site]:
    """Sites of ``region`` adjacent to ``v``, in E, W, N, S (then NE, NW, SW, SE) order."""
    if not region.contains(v):
        raise ValueError(f"site {tuple(v)} is outside {region!r}")
    x, y = v
    out = []
    for dx, dy in Adjacency(adj).offsets:
        w = Site(x + dx, y + dy)
        if region.contains(w):
            out.append(w)
    return out


def _adjacent_to(region: Region, outside: np.ndarray, adj: Adjacency) -> np.ndarray:
    """Mask of region sites with an ``adj``-neighbour in the padded ``outside`` mask.

    ``outside`` has the region's shape padded by one cell on every side.
    """
    h, w = region.shape
    hit = np.zeros(region.shape, dtype=bool)
    for dx, dy in Adjacency(adj).offsets:
        hit |= outside[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]
    return hit & region.mask


def boundary_mask(region: Region) -> np.ndarray:
    padded = np.zeros((region.height + 2, region.width + 2), dtype=bool)
    padded[1:-1, 1:-1] = region.mask
    return _adjacent_to(region, ~padded, NN)


def boundary(region: Region) -> frozenset[Site]:
    """Sites of ``region`` having a nearest neighbour outside it."""
    return _mask_to_sites(region, boundary_mask(region))


def hole_side_mask(region: Region, adj: Adjacency = STAR) -> np.ndarray:
    """Ring sites that are ``adj``-adjacent to the hole."""
    if not region.is_ring:
        raise ValueError(f"{region!r} has no hole")
    padded = np.zeros((region.height + 2, region.width + 2), dtype=bool)
    lo, hi = region.hole, region.hole
    r0 = -region.y0 + 1
    c0 = -region.x0 + 1
    padded[r0 - lo : r0 + hi + 1, c0 - lo : c0 + hi + 1] = True
    return _adjacent_to(region, padded, adj)


def exterior_side_mask(region: Region, adj: Adjacency = STAR) -> np.ndarray:
    """Region sites that are ``adj``-adjacent to the complement of the bounding box."""
    padded = np.ones((region.height + 2, region.width + 2), dtype=bool)
    padded[1:-1, 1:-1] = False
    return _adjacent_to(region, padded, adj)


def inner_boundary(region: Region) -> frozenset[Site]:
    """Innermost L-infinity ring of a ring-shaped region (sites touching the hole, corners included)."""
    return _mask_to_sites(region, hole_side_mask(region, STAR))


def outer_boundary(region: Region) -> frozenset[Site]:
    """Outermost L-infinity ring of a ring-shaped region."""
    if not region.is_ring:
        raise ValueError(f"{region!r} has no hole")
    return _mask_to_sites(region, exterior_side_mask(region, STAR))


def _mask_to_sites(region: Region, mask: np.ndarray) -> frozenset[Site]:
    rows, cols = np.nonzero(mask)
    return frozenset(Site(int(c) + region.x0, int(r) + region.y0) for r, c in zip(rows, cols))


def sites_to_mask(region: Region, sites) -> np.ndarray:
    m = np.zeros(region.shape, dtype=bool)
    for v in sites:
        if not region.contains(v):
            raise ValueError(f"site {tuple(v)} is outside {region!r}")
        m[v[1] - region.y0, v[0] - region.x0] = True
    return m
