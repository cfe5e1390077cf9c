"""Compiled inner loops. Everything here works on packed site indices."""
from __future__ import annotations

import numpy as np
from numba import njit

_U = np.uint64
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_TWO_M53 = 1.0 / 9007199254740992.0

GROW = 0
IGNITE = 1
BURN = 2


@njit(cache=True, inline="always")
def _mix(z):
    z = z + _GOLDEN
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def stream_uniform(seed, x, y, kind, index):
    """Uniform on (0, 1) addressed by (seed, x, y, kind, index); pure function of its key."""
    h = _mix(_U(seed))
    h = _mix(h ^ _U(x))
    h = _mix(h ^ _U(y))
    h = _mix(h ^ _U(kind))
    h = _mix(h ^ _U(index))
    return (float(h >> _S11) + 0.5) * _TWO_M53


@njit(cache=True)
def stream_event_time(seed, x, y, kind, rate, index):
    t = 0.0
    for k in range(index + 1):
        t += -np.log(stream_uniform(seed, x, y, kind, k)) / rate
    return t


@njit(cache=True)
def stream_times_until(seed, x, y, kind, rate, horizon):
    out = np.empty(8)
    m = 0
    if rate <= 0.0:
        return out[:0]
    t = 0.0
    k = 0
    while True:
        t += -np.log(stream_uniform(seed, x, y, kind, k)) / rate
        if t > horizon:
            break
        if m == out.size:
            out = np.concatenate((out, np.empty(out.size)))
        out[m] = t
        m += 1
        k += 1
    return out[:m]


@njit(cache=True)
def first_times(seed, xs, ys, kind, rate):
    out = np.empty(xs.size)
    for s in range(xs.size):
        out[s] = -np.log(stream_uniform(seed, xs[s], ys[s], kind, 0)) / rate
    return out


@njit(cache=True)
def first_times_after(seed, xs, ys, kind, rate, after):
    """First event time strictly after ``after`` for each site."""
    out = np.empty(xs.size)
    for s in range(xs.size):
        t = 0.0
        k = 0
        while t <= after:
            t += -np.log(stream_uniform(seed, xs[s], ys[s], kind, k)) / rate
            k += 1
        out[s] = t
    return out


@njit(cache=True)
def any_event_before(seed, xs, ys, kind, rate, until):
    """Per site: does the stream have an event at time <= until?"""
    out = np.zeros(xs.size, dtype=np.bool_)
    if rate <= 0.0:
        return out
    for s in range(xs.size):
        out[s] = -np.log(stream_uniform(seed, xs[s], ys[s], kind, 0)) / rate <= until
    return out


@njit(cache=True)
def generate_events(seed, xs, ys, idx, horizon, lam, with_growth, with_ignition):
    """All clock rings in [0, horizon], sorted by (time, site order, kind)."""
    n = xs.size
    cap = int(n * horizon * (1.0 + lam) * 1.25) + 64
    times = np.empty(cap)
    sites = np.empty(cap, dtype=np.int64)
    kinds = np.empty(cap, dtype=np.int8)
    m = 0
    for s in range(n):
        for kd in range(2):
            if kd == 0:
                if not with_growth:
                    continue
                rate = 1.0
            else:
                if not with_ignition or lam <= 0.0:
                    continue
                rate = lam
            t = 0.0
            k = 0
            while True:
                t += -np.log(stream_uniform(seed, xs[s], ys[s], kd, k)) / rate
                if t > horizon:
                    break
                if m == cap:
                    cap *= 2
                    t2 = np.empty(cap)
                    s2 = np.empty(cap, dtype=np.int64)
                    k2 = np.empty(cap, dtype=np.int8)
                    t2[:m] = times[:m]
                    s2[:m] = sites[:m]
                    k2[:m] = kinds[:m]
                    times, sites, kinds = t2, s2, k2
                times[m] = t
                sites[m] = idx[s]
                kinds[m] = kd
                m += 1
                k += 1
    order = np.argsort(times[:m], kind="mergesort")
    return times[:m][order], sites[:m][order], kinds[:m][order]


@njit(cache=True)
def eta_loop(times, sites, kinds, nbr, ncells):
    """Forest-fire process: ignition burns the whole occupied cluster of the ignited site."""
    state = np.zeros(ncells, dtype=np.uint8)
    ngrow = 0
    for e in range(kinds.size):
        if kinds[e] == 0:
            ngrow += 1
    cap = kinds.size + ngrow
    rt = np.empty(cap)
    rs = np.empty(cap, dtype=np.int64)
    rk = np.empty(cap, dtype=np.uint8)
    stack = np.empty(ncells, dtype=np.int64)
    deg = nbr.shape[1]
    m = 0
    for e in range(times.size):
        s = sites[e]
        t = times[e]
        if kinds[e] == 0:
            if state[s] == 0:
                state[s] = 1
                rt[m] = t
                rs[m] = s
                rk[m] = GROW
                m += 1
            continue
        rt[m] = t
        rs[m] = s
        rk[m] = IGNITE
        m += 1
        if state[s] == 0:
            continue
        state[s] = 0
        top = 0
        stack[top] = s
        top += 1
        rt[m] = t
        rs[m] = s
        rk[m] = BURN
        m += 1
        while top > 0:
            top -= 1
            u = stack[top]
            for j in range(deg):
                w = nbr[u, j]
                if w >= 0 and state[w] == 1:
                    state[w] = 0
                    stack[top] = w
                    top += 1
                    rt[m] = t
                    rs[m] = w
                    rk[m] = BURN
                    m += 1
    return rt[:m], rs[:m], rk[:m]


@njit(cache=True)
def uf_find(parent, a):
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


@njit(cache=True)
def uf_union(parent, size, nxt, a, b):
    """Union by size; splices the two circular member lists. Returns the new root."""
    ra = uf_find(parent, a)
    rb = uf_find(parent, b)
    if ra == rb:
        return ra
    if size[ra] < size[rb]:
        ra, rb = rb, ra
    parent[rb] = ra
    size[ra] += size[rb]
    tmp = nxt[ra]
    nxt[ra] = nxt[rb]
    nxt[rb] = tmp
    return ra


@njit(cache=True)
def eta_threshold_loop(times, sites, kinds, nbr, ncells, L):
    """Threshold process: a cluster reaching size L burns at that instant.

    Each occupation of a site is a fresh union-find element, so burnt clusters are
    simply abandoned rather than deleted.
    """
    ngrow = 0
    for e in range(kinds.size):
        if kinds[e] == 0:
            ngrow += 1
    state = np.zeros(ncells, dtype=np.uint8)
    elem = np.full(ncells, -1, dtype=np.int64)
    parent = np.empty(ngrow + 1, dtype=np.int64)
    size = np.empty(ngrow + 1, dtype=np.int64)
    nxt = np.empty(ngrow + 1, dtype=np.int64)
    esite = np.empty(ngrow + 1, dtype=np.int64)
    cap = 2 * ngrow
    rt = np.empty(cap)
    rs = np.empty(cap, dtype=np.int64)
    rk = np.empty(cap, dtype=np.uint8)
    deg = nbr.shape[1]
    ne = 0
    m = 0
    for e in range(times.size):
        if kinds[e] != 0:
            continue
        s = sites[e]
        if state[s] == 1:
            continue
        t = times[e]
        h = ne
        ne += 1
        parent[h] = h
        size[h] = 1
        nxt[h] = h
        esite[h] = s
        elem[s] = h
        state[s] = 1
        rt[m] = t
        rs[m] = s
        rk[m] = GROW
        m += 1
        r = h
        for j in range(deg):
            w = nbr[s, j]
            if w >= 0 and state[w] == 1:
                r = uf_union(parent, size, nxt, r, elem[w])
        if size[r] >= L:
            cur = r
            while True:
                v = esite[cur]
                state[v] = 0
                elem[v] = -1
                rt[m] = t
                rs[m] = v
                rk[m] = BURN
                m += 1
                cur = nxt[cur]
                if cur == r:
                    break
    return rt[:m], rs[:m], rk[:m]


@njit(cache=True)
def tree_loop(times, nodes, kinds, nnodes):
    """Directed binary tree in heap order (root 1, parent of v is v // 2).

    An ignition at an occupied node burns it and every occupied ancestor up to the
    first vacant one.
    """
    state = np.zeros(nnodes + 1, dtype=np.uint8)
    ngrow = 0
    for e in range(kinds.size):
        if kinds[e] == 0:
            ngrow += 1
    cap = kinds.size + ngrow
    rt = np.empty(cap)
    rs = np.empty(cap, dtype=np.int64)
    rk = np.empty(cap, dtype=np.uint8)
    m = 0
    for e in range(times.size):
        v = nodes[e]
        t = times[e]
        if kinds[e] == 0:
            if state[v] == 0:
                state[v] = 1
                rt[m] = t
                rs[m] = v
                rk[m] = GROW
                m += 1
            continue
        rt[m] = t
        rs[m] = v
        rk[m] = IGNITE
        m += 1
        while v >= 1 and state[v] == 1:
            state[v] = 0
            rt[m] = t
            rs[m] = v
            rk[m] = BURN
            m += 1
            v //= 2
    return rt[:m], rs[:m], rk[:m]


@njit(cache=True)
def flood(mask, nbr, start):
    """Sites reachable from ``start`` through True cells of ``mask`` (flat), as a bool array."""
    seen = np.zeros(mask.size, dtype=np.bool_)
    if not mask[start]:
        return seen
    stack = np.empty(mask.size, dtype=np.int64)
    top = 0
    stack[top] = start
    top += 1
    seen[start] = True
    deg = nbr.shape[1]
    while top > 0:
        top -= 1
        u = stack[top]
        for j in range(deg):
            w = nbr[u, j]
            if w >= 0 and mask[w] and not seen[w]:
                seen[w] = True
                stack[top] = w
                top += 1
    return seen


@njit(cache=True)
def reaches(mask, nbr, sources, targets):
    """Is some True source cell joined to some True target cell through ``mask``?"""
    seen = np.zeros(mask.size, dtype=np.bool_)
    stack = np.empty(mask.size, dtype=np.int64)
    top = 0
    for s in range(mask.size):
        if sources[s] and mask[s]:
            if targets[s]:
                return True
            seen[s] = True
            stack[top] = s
            top += 1
    deg = nbr.shape[1]
    while top > 0:
        top -= 1
        u = stack[top]
        for j in range(deg):
            w = nbr[u, j]
            if w >= 0 and mask[w] and not seen[w]:
                if targets[w]:
                    return True
                seen[w] = True
                stack[top] = w
                top += 1
    return False
