import io

import numpy as np
import pytest

from forestfire.dynamics import TrajectoryConfig, run_eta, run_eta_L
from forestfire.eventlog import BURN, GROW, IGNITE, EventLog, validate
from forestfire.tree import TreeConfig, run_zeta


def _logs():
    return [
        run_eta(TrajectoryConfig(6, 3.0, seed=1, lam=0.2)),
        run_eta_L(TrajectoryConfig(6, 3.0, seed=1, L=7)),
        run_zeta(TreeConfig(4, 0.3, 3.0, seed=1)),
    ]


def test_roundtrip(tmp_path):
    for j, log in enumerate(_logs()):
        path = tmp_path / f"log{j}.csv"
        log.save(path)
        back = EventLog.load(path)
        assert back == log
        assert back.dumps() == log.dumps()
        validate(back)


def test_csv_layout():
    log = run_eta(TrajectoryConfig(2, 1.5, seed=3, lam=0.5))
    lines = log.dumps().splitlines()
    assert lines[0].startswith("# {")
    assert lines[1] == "time,site_x,site_y,type"
    assert len(lines) == 2 + len(log)
    header = EventLog.loads(log.dumps()).header
    assert {"model", "n", "t", "seed", "p_c", "lambda"} <= set(header)


def test_tree_nodes_as_bit_paths():
    log = run_zeta(TreeConfig(3, 0.5, 4.0, seed=2))
    rows = log.dumps().splitlines()[2:]
    for row, node in zip(rows, log.x):
        assert row.split(",")[1] == format(int(node), "b")
        assert row.split(",")[2] == ""


def test_empty_log():
    log = EventLog.empty({"model": "eta", "n": 0, "t": 1.0, "seed": 0, "lambda": 0.1, "region": {"kind": "box", "n": 0}})
    assert len(log) == 0
    validate(log)
    assert EventLog.loads(log.dumps()) == log


def test_bad_header_rejected():
    with pytest.raises(ValueError):
        EventLog.loads("time,site_x,site_y,type\n")


def _tampered(log, keep):
    return EventLog(log.header, log.time[keep], log.x[keep], log.y[keep], log.type[keep])


def test_validate_detects_missing_burn():
    log = run_eta(TrajectoryConfig(8, 4.0, seed=0, lam=0.3))
    burns = np.flatnonzero(log.type == BURN)
    assert burns.size
    keep = np.ones(len(log), dtype=bool)
    keep[burns[0]] = False
    with pytest.raises(ValueError):
        validate(_tampered(log, keep))


def test_validate_detects_time_reversal():
    log = run_eta(TrajectoryConfig(3, 2.0, seed=0, lam=0.3))
    bad = EventLog(log.header, log.time[::-1].copy(), log.x, log.y, log.type)
    with pytest.raises(ValueError):
        validate(bad)


def test_validate_detects_double_grow():
    log = run_eta(TrajectoryConfig(3, 2.0, seed=0, lam=0.01))
    g = np.flatnonzero(log.type == GROW)[0]
    idx = np.insert(np.arange(len(log)), g + 1, g)
    with pytest.raises(ValueError):
        validate(EventLog(log.header, log.time[idx], log.x[idx], log.y[idx], log.type[idx]))


def test_validate_tree_path_burns():
    log = run_zeta(TreeConfig(5, 0.5, 5.0, seed=4))
    validate(log)
    ign = np.flatnonzero(log.type == IGNITE)
    # drop one burn from a fire that burnt several nodes
    for i in ign:
        j = i + 1
        while j < len(log) and log.type[j] == BURN and log.time[j] == log.time[i]:
            j += 1
        if j - i > 2:
            keep = np.ones(len(log), dtype=bool)
            keep[j - 1] = False
            with pytest.raises(ValueError):
                validate(_tampered(log, keep))
            return
    pytest.fail("no multi-node fire in the sample trajectory")


def test_state_at_matches_replay():
    log = run_eta(TrajectoryConfig(5, 3.0, seed=7, lam=0.2))
    state = np.zeros(log.region.shape, dtype=np.uint8)
    checkpoints = np.unique(log.time)[::7]
    c = 0
    for t, x, y, k in zip(log.time, log.x, log.y, log.type):
        while c < checkpoints.size and checkpoints[c] < t:
            assert np.array_equal(log.state_at(checkpoints[c]), state)
            c += 1
        if k == GROW:
            state[y + 5, x + 5] = 1
        elif k == BURN:
            state[y + 5, x + 5] = 0
    assert np.array_equal(log.state_at(3.0), state)
