import math

import numpy as np
import pytest
from scipy import stats

from forestfire.clocks import GROWTH, IGNITION, ScriptedClocks
from forestfire.eventlog import validate
from forestfire.experiments import level_seed, recursion_check, tree_first_burns, tree_stats
from forestfire.tree import (
    TreeConfig,
    first_burn_time,
    lower_bound,
    node_path,
    recursion_rhs,
    run_zeta,
    theta_tree,
    upper_bound,
)


def test_theta_tree_values():
    assert theta_tree(0.5) == 0.0
    assert theta_tree(0.3) == 0.0
    assert theta_tree(1.0) == 1.0
    assert theta_tree(0.75) == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        theta_tree(1.5)


def test_upper_bound_values():
    assert upper_bound(math.log(2)) == pytest.approx(0.0, abs=1e-15)
    assert upper_bound(0.3) == 0.0
    assert upper_bound(1.0) == pytest.approx(0.41802329313067355, rel=1e-12)
    assert upper_bound(60.0) == pytest.approx(1.0)
    for t in (0.2, 0.7, 1.0, 2.5):
        assert upper_bound(t) == pytest.approx(theta_tree(1 - math.exp(-t)))
        assert lower_bound(t) == upper_bound(t) / 2
    with pytest.raises(ValueError):
        upper_bound(0.0)


def test_recursion_rhs_values():
    assert recursion_rhs(0.0, 0.4, 0.8, 0.1) == 0.0
    t, lam = 0.8, 1e-3
    assert recursion_rhs(1.0, 1.0, t, lam) == pytest.approx((1 - math.exp(-t)) * math.exp(-lam * t))
    # high-precision evaluation of the closed form: 0.0990415215399280...
    assert recursion_rhs(0.1, 0.15, 0.8, 1e-3) == pytest.approx(0.09904152153992805, rel=1e-13)
    with pytest.raises(ValueError):
        recursion_rhs(1.2, 0.0, 0.8, 0.1)


def test_node_count_and_paths():
    assert TreeConfig(0, 0.1, 1.0).nodes == 1
    assert TreeConfig(3, 0.1, 1.0).nodes == 15
    assert node_path(1) == "1" and node_path(6) == "110"
    with pytest.raises(ValueError):
        TreeConfig(-1, 0.1, 1.0)


def test_leaf_ignition_burns_path_to_root():
    path = [8, 4, 2, 1]
    script = {((v - 1, 0), GROWTH): [0.1 * (j + 1)] for j, v in enumerate(path)}
    script[((3 - 1, 0), GROWTH)] = [0.05]  # sibling of 2, must survive
    script[((8 - 1, 0), IGNITION)] = [0.9]
    log = run_zeta(TreeConfig(3, 0.1, 1.0), ScriptedClocks(script))
    validate(log)
    burns = [(t, int(v)) for t, v, k in zip(log.time, log.x, log.type) if k == 2]
    assert sorted(burns) == sorted((0.9, v) for v in path)
    assert first_burn_time(log) == 0.9
    assert log.state_at(1.0)[3] == 1


def test_burn_stops_at_vacant_ancestor():
    script = {((8 - 1, 0), GROWTH): [0.1], ((4 - 1, 0), GROWTH): [0.2], ((1 - 1, 0), GROWTH): [0.3]}
    script[((8 - 1, 0), IGNITION)] = [0.5]
    log = run_zeta(TreeConfig(3, 0.1, 1.0), ScriptedClocks(script))
    assert {int(v) for v, k in zip(log.x, log.type) if k == 2} == {8, 4}
    assert first_burn_time(log) == math.inf


def test_random_tree_logs_valid():
    for seed in range(5):
        validate(run_zeta(TreeConfig(6, 0.2, 3.0, seed)))


def test_f_within_upper_bound_depth_14():
    burns = tree_first_burns(14, 1e-3, 1.2, 400, seed=3)
    f = float(np.mean(burns <= 1.2))
    se = math.sqrt(max(f * (1 - f), 1e-12) / burns.size)
    assert 0.0 <= f <= upper_bound(1.2) + 3 * se


def test_f_nondecreasing_in_t():
    rows = tree_stats([5], 0.05, [0.5, 1.0, 1.5, 2.0], replicas=300, seed=1)
    est = [r["estimate"] for r in rows]
    assert est == sorted(est)


def test_subtree_matches_smaller_tree():
    n, lam, horizon, reps = 5, 0.1, 3.0, 10000
    child = tree_first_burns(n + 1, lam, horizon, reps, level_seed(0, n + 1), node=2)
    root = tree_first_burns(n, lam, horizon, reps, level_seed(0, n))
    cap = horizon + 1.0  # no fire by the horizon
    res = stats.ks_2samp(np.minimum(child, cap), np.minimum(root, cap))
    assert res.pvalue > 0.01


def test_recursion_check_small():
    r = recursion_check(4, 0.05, 0.8, 1.5, replicas=2000, seed=5)
    assert r["ok"]
    assert 0 <= r["rhs"] <= 1 and r["se"] > 0
    with pytest.raises(ValueError):
        recursion_check(4, 0.05, 1.5, 0.8, replicas=10)
