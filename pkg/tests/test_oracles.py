import math

import numpy as np
from scipy import stats

from forestfire.lattice import NN, STAR, Region
from forestfire.oracles import has_winding_cycle, has_winding_cycle_bruteforce
from forestfire.selftest import chain_first_fires, exact_first_fires, ks_distance, ks_threshold


def _single_site_cdf(lam):
    # first fire = growth time + ignition wait: sum of Exp(1) and Exp(lam)
    def cdf(t):
        t = np.asarray(t, dtype=float)
        return 1 - (lam * np.exp(-t) - np.exp(-lam * t)) / (lam - 1)

    return cdf


def test_single_site_first_fire_matches_closed_form():
    lam = 0.5
    region = Region.box(0)
    exact = exact_first_fires(4000, 1, lam=lam, horizon=60.0, region=region)
    chain = chain_first_fires(4000, 2, lam=lam, horizon=60.0, region=region, dt=1e-2)
    cdf = _single_site_cdf(lam)
    assert np.all(np.isfinite(exact))
    assert stats.kstest(exact, cdf).pvalue > 0.001
    # the fixed-step chain is only accurate to O(dt)
    assert stats.kstest(chain, cdf).statistic < 0.04


def test_ks_distance_handles_no_event():
    a = np.array([1.0, 2.0, np.inf, np.inf])
    b = np.array([1.0, 2.0, 3.0, np.inf])
    assert ks_distance(a, b) == 0.25
    assert ks_distance(a, a) == 0.0
    assert ks_threshold(10000, 10000) < 0.03


def test_winding_detects_square_and_not_arc():
    square = [(x, y) for x in range(-2, 3) for y in range(-2, 3) if max(abs(x), abs(y)) == 2]
    assert has_winding_cycle(square, NN)
    assert not has_winding_cycle(square[:-1], NN)
    # a cycle that does not enclose the origin
    off = [(x, y) for x in range(3, 6) for y in range(3, 6) if (x, y) != (4, 4)]
    assert not has_winding_cycle(off, NN)
    assert has_winding_cycle_bruteforce(off, NN) is False


def test_star_diamond_winds():
    diamond = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    assert has_winding_cycle(diamond, STAR)
    assert not has_winding_cycle(diamond, NN)
    assert has_winding_cycle_bruteforce(diamond, STAR)
