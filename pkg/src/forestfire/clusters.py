"""Occupied clusters, crossings and circuits around the origin.

Circuit questions are answered by planar duality instead of searching for
cycles: an occupied nearest-neighbour circuit around the origin exists inside a
ring iff no *-path of the remaining sites joins the hole to the exterior, and a
vacant *-circuit exists iff no occupied nearest-neighbour path does.
"""
from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import _kernels as K
from .lattice import (
    NN,
    STAR,
    Adjacency,
    Region,
    Site,
    exterior_side_mask,
    hole_side_mask,
    sites_to_mask,
)

_STRUCTURE = {
    NN: ndimage.generate_binary_structure(2, 1),
    STAR: np.ones((3, 3), dtype=bool),
}


@dataclass
class Grid:
    """Occupancy (1 occupied, 0 vacant) of every site of a region."""

    region: Region
    state: np.ndarray
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        state = np.asarray(self.state, dtype=np.uint8)
        if state.shape != self.region.shape:
            raise ValueError(f"state shape {state.shape} does not match region shape {self.region.shape}")
        self.state = np.where(self.region.mask, state, 0).astype(np.uint8)

    @classmethod
    def vacant(cls, region: Region) -> Grid:
        return cls(region, np.zeros(region.shape, dtype=np.uint8))

    @classmethod
    def full(cls, region: Region) -> Grid:
        return cls(region, np.ones(region.shape, dtype=np.uint8))

    @classmethod
    def from_sites(cls, region: Region, sites: Iterable) -> Grid:
        return cls(region, sites_to_mask(region, sites).astype(np.uint8))

    def __getitem__(self, v) -> int:
        if not self.region.contains(v):
            raise ValueError(f"site {tuple(v)} is outside {self.region!r}")
        return int(self.state[v[1] - self.region.y0, v[0] - self.region.x0])

    def __setitem__(self, v, value) -> None:
        if not self.region.contains(v):
            raise ValueError(f"site {tuple(v)} is outside {self.region!r}")
        self.state[v[1] - self.region.y0, v[0] - self.region.x0] = 1 if value else 0

    @property
    def occupied(self) -> np.ndarray:
        return self.state.astype(bool)

    def occupied_sites(self) -> frozenset[Site]:
        rows, cols = np.nonzero(self.state)
        return frozenset(Site(int(c) + self.region.x0, int(r) + self.region.y0) for r, c in zip(rows, cols))

    def restrict(self, region: Region) -> np.ndarray:
        """Occupancy (bool) over ``region``'s bounding rectangle, False off ``region``."""
        return restrict(self.occupied, self.region, region)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return self.region == other.region and np.array_equal(self.state, other.state)


def restrict(mask: np.ndarray, src: Region, dst: Region) -> np.ndarray:
    if not (src.x0 <= dst.x0 and dst.x1 <= src.x1 and src.y0 <= dst.y0 and dst.y1 <= src.y1):
        raise ValueError(f"{dst!r} does not fit inside {src!r}")
    sub = mask[dst.y0 - src.y0 : dst.y1 - src.y0 + 1, dst.x0 - src.x0 : dst.x1 - src.x0 + 1]
    return sub & dst.mask


def occupied_cluster(grid: Grid, v, adj: Adjacency = NN, region: Region | None = None) -> frozenset[Site]:
    """Maximal ``adj``-connected occupied set containing ``v``, with paths confined to ``region``."""
    region = grid.region if region is None else region
    if not region.contains(v):
        raise ValueError(f"site {tuple(v)} is outside {region!r}")
    occ = grid.restrict(region).ravel()
    seen = K.flood(occ, region.neighbor_table(adj), region.index(v))
    return frozenset(region.site(i) for i in np.flatnonzero(seen))


def label_clusters(mask: np.ndarray, adj: Adjacency = NN) -> tuple[np.ndarray, int]:
    """Connected-component labels (0 = background) of a boolean array."""
    return ndimage.label(mask, structure=_STRUCTURE[Adjacency(adj)])


def clusters_in_region(grid: Grid, region: Region | None = None, adj: Adjacency = NN) -> list[frozenset[Site]]:
    """Partition of the occupied sites of ``region`` into maximal ``adj``-connected clusters."""
    region = grid.region if region is None else region
    labels, count = label_clusters(grid.restrict(region), adj)
    flat = labels.ravel()
    order = np.argsort(flat, kind="stable")
    bounds = np.searchsorted(flat[order], np.arange(1, count + 2))
    return [
        frozenset(region.site(i) for i in order[bounds[k] : bounds[k + 1]])
        for k in range(count)
    ]


def _require_ring(region: Region) -> None:
    if not region.is_ring:
        raise ValueError(f"{region!r} is not an annulus")


def crossing_mask(open_mask: np.ndarray, region: Region, sources: np.ndarray, targets: np.ndarray, adj: Adjacency) -> bool:
    """Is there an ``adj``-path of open sites of ``region`` from a source site to a target site?"""
    return bool(
        K.reaches(
            (open_mask & region.mask).ravel(),
            region.neighbor_table(adj),
            sources.ravel(),
            targets.ravel(),
        )
    )


def surrounds_origin_mask(cluster: np.ndarray, annulus: Region) -> bool:
    _require_ring(annulus)
    free = annulus.mask & ~cluster
    return not crossing_mask(free, annulus, hole_side_mask(annulus, STAR), exterior_side_mask(annulus, STAR), STAR)


def surrounds_origin(cluster: Iterable, annulus: Region) -> bool:
    """Does ``cluster`` contain a nearest-neighbour circuit around the origin?

    Decided by duality: true iff no *-path of non-cluster sites of the annulus
    runs from the hole to the outside.
    """
    _require_ring(annulus)
    cluster = list(cluster)
    for v in cluster:
        if not annulus.contains(v):
            raise ValueError(f"cluster site {tuple(v)} is outside {annulus!r}")
    return surrounds_origin_mask(sites_to_mask(annulus, cluster), annulus)


def has_vacant_star_circuit_mask(occupied: np.ndarray, ring: Region) -> bool:
    _require_ring(ring)
    return not crossing_mask(occupied, ring, hole_side_mask(ring, NN), exterior_side_mask(ring, NN), NN)


def has_vacant_star_circuit(grid: Grid, ring: Region) -> bool:
    """Is there a vacant *-circuit around the origin inside ``ring``?"""
    return has_vacant_star_circuit_mask(grid.restrict(ring), ring)


def boxes_connected(occupied: np.ndarray, region: Region, r_in: int, r_out: int) -> bool:
    """Occupied nearest-neighbour path from the boundary of B(r_in) to that of B(r_out).

    ``occupied`` is indexed like ``region``'s bounding rectangle, which must contain B(r_out).
    Any such path contains one between the two boundary squares that stays in the closed
    ring between them, so the search is confined there.
    """
    if not 0 <= r_in < r_out:
        raise ValueError(f"need 0 <= r_in < r_out, got {r_in}, {r_out}")
    ring = Region.ring(r_in - 1, r_out) if r_in > 0 else Region.box(r_out)
    occ = restrict(occupied, region, ring)
    linf = ring.linf()
    return crossing_mask(occ, ring, linf == r_in, linf == r_out, NN)


def rect_crossing(occupied: np.ndarray, region: Region, target: Region, vertical: bool = True) -> bool:
    """Occupied nearest-neighbour crossing of rectangle ``target`` inside it.

    Vertical joins the bottom row to the top row; horizontal joins the left and right columns.
    """
    occ = restrict(occupied, region, target)
    src = np.zeros(target.shape, dtype=bool)
    dst = np.zeros(target.shape, dtype=bool)
    if vertical:
        src[0, :] = True
        dst[-1, :] = True
    else:
        src[:, 0] = True
        dst[:, -1] = True
    return crossing_mask(occ, target, src, dst, NN)


class StaleHandleError(ValueError):
    """Raised for operations on a handle whose cluster has burnt."""


class ClusterIndex:
    """Union-find over occupation epochs with size tracking and member lists.

    Every ``insert`` creates a new element (a fresh epoch of that site), so burning a
    cluster just retires its elements. Member lists are circular linked lists that
    are spliced in constant time on union. Retired slots are reclaimed by
    compaction once they exceed half the capacity; handles stay valid across it.
    """

    def __init__(self, capacity: int = 64):
        capacity = max(int(capacity), 4)
        self._parent = np.zeros(capacity, dtype=np.int64)
        self._size = np.zeros(capacity, dtype=np.int64)
        self._next = np.zeros(capacity, dtype=np.int64)
        self._alive = np.zeros(capacity, dtype=bool)
        self._handle_at: list[int] = [-1] * capacity
        self._site_at: list = [None] * capacity
        self._slot: dict[int, int] = {}
        self._live_site: dict = {}
        self._used = 0
        self._dead = 0
        self._next_handle = 0
        self.compactions = 0

    @property
    def capacity(self) -> int:
        return self._parent.size

    def __len__(self) -> int:
        return len(self._slot)

    def _slot_of(self, handle: int) -> int:
        try:
            return self._slot[handle]
        except KeyError:
            raise StaleHandleError(f"handle {handle} is not live") from None

    def alive(self, handle: int) -> bool:
        return handle in self._slot

    def handle_of(self, site) -> int | None:
        return self._live_site.get(site)

    def site(self, handle: int):
        return self._site_at[self._slot_of(handle)]

    def insert(self, site=None) -> int:
        if site is not None and site in self._live_site:
            raise ValueError(f"site {site!r} already has a live element")
        if self._used == self.capacity:
            if self._dead * 2 > self.capacity:
                self._compact()
            else:
                self._grow()
        slot = self._used
        self._used += 1
        handle = self._next_handle
        self._next_handle += 1
        self._parent[slot] = slot
        self._size[slot] = 1
        self._next[slot] = slot
        self._alive[slot] = True
        self._handle_at[slot] = handle
        self._site_at[slot] = site
        self._slot[handle] = slot
        if site is not None:
            self._live_site[site] = handle
        return handle

    def find(self, handle: int) -> int:
        return self._handle_at[K.uf_find(self._parent, self._slot_of(handle))]

    def union(self, a: int, b: int) -> int:
        root = K.uf_union(self._parent, self._size, self._next, self._slot_of(a), self._slot_of(b))
        return self._handle_at[root]

    def size(self, handle: int) -> int:
        return int(self._size[K.uf_find(self._parent, self._slot_of(handle))])

    def members(self, handle: int) -> Iterator[int]:
        start = self._slot_of(handle)
        cur = start
        while True:
            yield self._handle_at[cur]
            cur = int(self._next[cur])
            if cur == start:
                break

    def burn(self, handle: int) -> list:
        """Retire every member of ``handle``'s cluster; returns their sites (or handles)."""
        start = self._slot_of(handle)
        out = []
        cur = start
        while True:
            h = self._handle_at[cur]
            site = self._site_at[cur]
            out.append(site if site is not None else h)
            self._alive[cur] = False
            del self._slot[h]
            if site is not None:
                del self._live_site[site]
            self._dead += 1
            cur = int(self._next[cur])
            if cur == start:
                break
        return out

    def _grow(self) -> None:
        cap = self.capacity * 2
        for name in ("_parent", "_size", "_next"):
            arr = np.zeros(cap, dtype=np.int64)
            arr[: self._used] = getattr(self, name)[: self._used]
            setattr(self, name, arr)
        alive = np.zeros(cap, dtype=bool)
        alive[: self._used] = self._alive[: self._used]
        self._alive = alive
        self._handle_at.extend([-1] * (cap - len(self._handle_at)))
        self._site_at.extend([None] * (cap - len(self._site_at)))

    def _compact(self) -> None:
        live = np.flatnonzero(self._alive[: self._used])
        remap = np.full(self._used, -1, dtype=np.int64)
        remap[live] = np.arange(live.size)
        roots = np.array([K.uf_find(self._parent, int(s)) for s in live], dtype=np.int64)
        cap = self.capacity
        parent = np.zeros(cap, dtype=np.int64)
        size = np.zeros(cap, dtype=np.int64)
        nxt = np.zeros(cap, dtype=np.int64)
        parent[: live.size] = remap[roots]
        size[: live.size] = self._size[live]
        nxt[: live.size] = remap[self._next[live]]
        alive = np.zeros(cap, dtype=bool)
        alive[: live.size] = True
        handle_at = [-1] * cap
        site_at = [None] * cap
        for new, old in enumerate(live):
            handle_at[new] = self._handle_at[old]
            site_at[new] = self._site_at[old]
            self._slot[handle_at[new]] = new
        self._parent, self._size, self._next, self._alive = parent, size, nxt, alive
        self._handle_at, self._site_at = handle_at, site_at
        self._used = int(live.size)
        self._dead = 0
        self.compactions += 1
