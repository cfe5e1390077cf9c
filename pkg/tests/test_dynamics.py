import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forestfire.clocks import GROWTH, IGNITION, ClockStream, ScriptedClocks
from forestfire.clusters import label_clusters
from forestfire.dynamics import (
    P_C,
    T_C,
    TrajectoryConfig,
    critical_time,
    replay,
    run_eta,
    run_eta_L,
    run_sigma,
    run_xi,
    scales,
    scales_L,
)
from forestfire.eventlog import BURN, GROW, IGNITE, validate
from forestfire.lattice import NN, Region
from forestfire.tree import TreeConfig, first_burn_time, run_zeta


def test_critical_time_value():
    # -log(1 - 0.592746) evaluated independently
    assert T_C == pytest.approx(0.8983182095715451, abs=1e-15)
    assert critical_time(P_C) == T_C
    assert 1 - math.exp(-T_C) == pytest.approx(P_C, abs=1e-15)


def test_config_validation():
    with pytest.raises(ValueError):
        TrajectoryConfig(4, 1.0, lam=0.1, L=5)
    with pytest.raises(ValueError):
        TrajectoryConfig(4, 1.0)
    with pytest.raises(ValueError):
        TrajectoryConfig(4, 0.0, lam=0.1)
    with pytest.raises(ValueError):
        TrajectoryConfig(4, 1.0, L=1)


def test_single_site_burns_at_ignition():
    clocks = ScriptedClocks({((0, 0), GROWTH): [0.3], ((0, 0), IGNITION): [0.8]})
    log = run_eta(TrajectoryConfig(0, 1.0, lam=0.1), clocks)
    assert list(log.records()) == [(0.3, (0, 0), "grow"), (0.8, (0, 0), "ignite"), (0.8, (0, 0), "burn")]
    assert log.header["clocks"] == "scripted"


def test_ignition_on_vacant_site_is_noop():
    clocks = ScriptedClocks({((0, 0), GROWTH): [0.9], ((0, 0), IGNITION): [0.4]})
    log = run_eta(TrajectoryConfig(0, 1.0, lam=0.1), clocks)
    assert [r[2] for r in log.records()] == ["ignite", "grow"]


def test_growth_on_occupied_site_is_ignored():
    clocks = ScriptedClocks({((0, 0), GROWTH): [0.1, 0.2, 0.3]})
    log = run_eta(TrajectoryConfig(0, 1.0, lam=0.1), clocks)
    assert list(log.time) == [0.1]


def test_fire_burns_whole_cluster_only():
    script = {((x, 0), GROWTH): [0.1 * (x + 3)] for x in (-2, -1, 0, 1)}
    script[((2, 2), GROWTH)] = [0.05]
    script[((0, 0), IGNITION)] = [0.9]
    log = run_eta(TrajectoryConfig(2, 1.0, lam=0.1), ScriptedClocks(script))
    burnt = {(int(x), int(y)) for x, y, k in zip(log.x, log.y, log.type) if k == BURN}
    assert burnt == {(-2, 0), (-1, 0), (0, 0), (1, 0)}
    assert log.state_at(1.0)[2 + 2, 2 + 2] == 1


def test_no_ignitions_matches_sigma():
    cfg = TrajectoryConfig(10, 2.0, seed=4, lam=1e-12)
    log = run_eta(cfg)
    assert not np.any(log.type == IGNITE)
    assert np.array_equal(log.state_at(2.0), run_sigma(4, Region.box(10), 2.0).state)


def test_logs_are_well_formed_and_dominated():
    for seed in range(5):
        cfg = TrajectoryConfig(12, 3.0, seed=seed, lam=0.05)
        log = run_eta(cfg)
        validate(log)
        first = ClockStream(seed, 0.05).first_times(cfg.box, GROWTH)
        for t in np.unique(log.time)[::25]:
            assert not np.any(log.state_at(t).astype(bool) & ~(first <= t))


def test_determinism_byte_identical():
    cfg = TrajectoryConfig(8, 2.0, seed=99, lam=0.1)
    assert run_eta(cfg).dumps() == run_eta(cfg).dumps()
    assert replay(run_eta(cfg).header).dumps() == run_eta(cfg).dumps()


def test_sigma_basics():
    r = Region.box(6)
    assert not run_sigma(1, r, 0.0).state.any()
    a, b = run_sigma(1, r, 0.5).occupied, run_sigma(1, r, 1.5).occupied
    assert np.all(a <= b)
    with pytest.raises(ValueError):
        run_sigma(1, r, -1.0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**63 - 1), t1=st.floats(0, 3), dt=st.floats(0, 3))
def test_sigma_monotone_property(seed, t1, dt):
    r = Region.box(5)
    assert np.all(run_sigma(seed, r, t1).occupied <= run_sigma(seed, r, t1 + dt).occupied)


def test_xi_equals_sigma_before_tc():
    r = Region.box(45)
    for t in (0.3, T_C - 1e-6):
        assert np.array_equal(run_xi(3, r, t).state, run_sigma(3, r, t).state)


def test_xi_removes_forced_surrounding_ring():
    a = Region.annulus(2)
    radius = 20
    ring = [v for v in a.sites() if max(abs(v[0]), abs(v[1])) == radius]
    script = {(v, GROWTH): [T_C - 0.01, T_C + 0.5] for v in ring}
    clocks = ScriptedClocks(script)
    region = Region.box(45)
    before = run_xi(0, region, T_C - 0.005, clocks=clocks)
    at = run_xi(0, region, T_C, clocks=clocks)
    later = run_xi(0, region, T_C + 0.6, clocks=clocks)
    assert all(before[v] == 1 for v in ring)
    assert all(at[v] == 0 for v in ring)
    assert at.info["removed"] == len(ring)
    assert at.info["max_level"] == 2
    assert all(later[v] == 1 for v in ring)


def test_xi_keeps_non_surrounding_cluster():
    a = Region.annulus(2)
    arc = [v for v in a.sites() if max(abs(v[0]), abs(v[1])) == 20 and v != (20, 0)]
    clocks = ScriptedClocks({(v, GROWTH): [0.1] for v in arc})
    g = run_xi(0, Region.box(45), T_C + 0.1, clocks=clocks)
    assert all(g[v] == 1 for v in arc) and g.info["removed"] == 0


def test_xi_removed_sites_regrow_monotonically():
    # at the true p_c a surrounding cluster is rare; a larger p_c makes one likely
    r = Region.box(45)
    p_c = 0.75
    t_c = critical_time(p_c)
    seed = next(s for s in range(50) if run_xi(s, r, t_c, p_c).info["removed"])
    states = [run_xi(seed, r, t_c + e, p_c).occupied for e in (0.0, 0.2, 1.0)]
    assert np.all(states[0] <= states[1]) and np.all(states[1] <= states[2])
    assert np.all(states[2] <= run_sigma(seed, r, t_c + 1.0).occupied)
    assert np.array_equal(run_xi(seed, r, t_c - 1e-9, p_c).state, run_sigma(seed, r, t_c - 1e-9).state)


def test_threshold_two_never_adjacent():
    for seed in range(5):
        log = run_eta_L(TrajectoryConfig(6, 3.0, seed=seed, L=2))
        validate(log)
        for t in np.unique(log.time):
            s = log.state_at(t).astype(bool)
            assert not np.any(s[:, 1:] & s[:, :-1]) and not np.any(s[1:, :] & s[:-1, :])


def test_threshold_above_region_never_burns():
    r = Region.box(4)
    log = run_eta_L(TrajectoryConfig(4, 3.0, seed=2, L=r.size + 1))
    assert not np.any(log.type == BURN)
    assert np.array_equal(log.state_at(3.0), run_sigma(2, r, 3.0).state)


def test_threshold_clusters_stay_small():
    L = 12
    log = run_eta_L(TrajectoryConfig(10, 2.5, seed=5, L=L))
    validate(log)
    assert np.any(log.type == BURN)
    for t in np.unique(log.time[log.type == GROW])[::10]:
        labels, n = label_clusters(log.state_at(t).astype(bool), NN)
        if n:
            assert np.bincount(labels.ravel())[1:].max() < L


def test_scales():
    sc = scales(1e-3)
    assert sc.K == pytest.approx(10.0) and sc.k == pytest.approx(5.623413251903491)
    assert sc.K_radius == 10 and sc.k_radius == 5
    one = scales(1.0)
    assert one.K == 1.0 and one.k == 1.0
    sl = scales_L(4096)
    assert sl.K == pytest.approx(16.0) and sl.k == pytest.approx(8.0)
    assert sl.K_radius == 16 and sl.k_radius == 8
    with pytest.raises(ValueError):
        scales(0.0)
    with pytest.raises(ValueError):
        scales_L(1)


def test_single_site_lattice_matches_tree_root():
    for seed in range(20):
        lattice = run_eta(TrajectoryConfig(0, 5.0, seed=seed, lam=0.5))
        tree = run_zeta(TreeConfig(0, 0.5, 5.0, seed))
        burns = lattice.time[lattice.type == BURN]
        assert (burns[0] if burns.size else math.inf) == first_burn_time(tree)
        assert np.array_equal(lattice.time, tree.time) and np.array_equal(lattice.type, tree.type)
