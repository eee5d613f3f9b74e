import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zonecast import (
    EXPLORER,
    ExperimentConfig,
    build_grid,
    build_torus,
    complexity_bound,
    estimate_P,
    explorer_paths,
    explorer_success,
    run_trial,
)


def test_complexity_bound_formula():
    assert complexity_bound(100, 4, 100, 8) == 360_000
    assert complexity_bound(100, 4, 0, 0) == 4 * 100 * 100
    assert complexity_bound(0, 0, 0, 0) == 0
    with pytest.raises(ValueError):
        complexity_bound(-1, 4, 0, 0)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig("ring", 10, 1, 0, 10, 0)
    with pytest.raises(ValueError):
        ExperimentConfig("torus", 10, 0, 0, 10, 0)
    with pytest.raises(ValueError):
        ExperimentConfig("torus", 10, 1, 100, 10, 0)  # n_b == n
    with pytest.raises(ValueError):
        ExperimentConfig("torus", 10, 1, 0, 0, 0)
    with pytest.raises(ValueError):
        ExperimentConfig("torus", 10, 1, 0, 10, 0, pair_mode="both")


def test_trial_without_byzantines_succeeds():
    cfg = ExperimentConfig("torus", 6, 1, 0, 10, seed=1, crosscheck=0.0)
    r = run_trial(cfg, 0)
    assert r.cover_found and r.success
    assert r.reliable_fraction == 1.0


def test_trial_deterministic():
    cfg = ExperimentConfig("torus", 8, 2, 4, 10, seed=3, crosscheck=0.0)
    assert run_trial(cfg, 5) == run_trial(cfg, 5)


def test_trial_byz_endpoint_fails():
    cfg = ExperimentConfig("torus", 5, 1, 20, 50, seed=2, crosscheck=0.0)
    saw_byz_endpoint = False
    for t in range(50):
        r = run_trial(cfg, t)
        if r.pair[0] in r.byz or r.pair[1] in r.byz:
            saw_byz_endpoint = True
            assert not r.success
    assert saw_byz_endpoint


def test_correct_only_pair_mode_never_picks_byz():
    cfg = ExperimentConfig("torus", 5, 1, 15, 30, seed=4, crosscheck=0.0,
                           pair_mode="correct-only")
    for t in range(30):
        r = run_trial(cfg, t)
        assert r.pair[0] not in r.byz and r.pair[1] not in r.byz


def test_estimate_no_byz_is_certain():
    cfg = ExperimentConfig("torus", 6, 1, 0, 25, seed=5, crosscheck=0.0)
    est = estimate_P(cfg)
    assert est.p_hat == 1.0 and est.ci95 == 0.0
    assert est.p_exists == 1.0
    assert est.mean_reliable_frac == 1.0


@given(st.integers(0, 10), st.integers(0, 2**31))
@settings(max_examples=8)
def test_exists_dominates_success(n_b, seed):
    cfg = ExperimentConfig("torus", 6, 2, n_b, 30, seed=seed, crosscheck=0.0)
    est = estimate_P(cfg)
    assert est.p_exists >= est.p_hat
    assert 0.0 <= est.p_hat <= 1.0 and est.ci95 >= 0.0


def test_crosscheck_trials_run_and_agree():
    cfg = ExperimentConfig("torus", 6, 1, 2, 4, seed=7, crosscheck=1.0)
    checked = 0
    for t in range(cfg.trials):
        r = run_trial(cfg, t)
        if r.crosschecked:
            checked += 1
            assert r.crosscheck_ok is True
            assert r.std_sent and r.auth_sent
    assert checked >= 1
    estimate_P(cfg)  # raises if any cross-check disagrees


# --- explorer baseline ---------------------------------------------------------


def assert_paths_valid(topo, ep):
    seen_interiors = set()
    for path in ep.paths:
        assert path[0] == ep.a and path[-1] == ep.b
        assert len(set(path)) == len(path)
        for x, y in zip(path, path[1:]):
            assert y in topo.neighbors[x]
        interior = set(path[1:-1])
        assert not interior & seen_interiors
        seen_interiors |= interior


def test_explorer_adjacent_on_torus():
    t = build_torus(5)
    ep = explorer_paths(t, t.index(3, 3), t.index(3, 4))
    assert ep.achieved == 4
    assert_paths_valid(t, ep)


def test_explorer_same_endpoint_rejected():
    t = build_torus(5)
    with pytest.raises(ValueError):
        explorer_paths(t, 7, 7)


def test_explorer_grid_corner_degrades():
    g = build_grid(8)
    ep = explorer_paths(g, g.index(1, 1), g.index(5, 5))
    assert ep.achieved <= 2
    assert_paths_valid(g, ep)


def nx_graph(topo):
    G = nx.Graph()
    G.add_nodes_from(range(topo.n))
    for v in range(topo.n):
        for q in topo.neighbors[v]:
            G.add_edge(v, q)
    return G


@given(st.integers(5, 9), st.data())
@settings(max_examples=20)
def test_explorer_full_rank_on_torus(N, data):
    t = build_torus(N)
    a = data.draw(st.integers(0, t.n - 1))
    b = data.draw(st.integers(0, t.n - 1).filter(lambda x: x != a))
    ep = explorer_paths(t, a, b)
    assert_paths_valid(t, ep)
    assert ep.achieved == 4
    assert nx.node_connectivity(nx_graph(t), a, b) >= 4


@given(st.data())
@settings(max_examples=20)
def test_explorer_full_rank_on_grid_interior(data):
    g = build_grid(9)
    interior = [
        g.index(i, j) for i in range(2, 9) for j in range(2, 9)
    ]
    a = data.draw(st.sampled_from(interior))
    b = data.draw(st.sampled_from(interior).filter(lambda x: x != a))
    ep = explorer_paths(g, a, b)
    assert_paths_valid(g, ep)
    assert ep.achieved == 4


def test_explorer_success_rule():
    t = build_torus(7)
    ep = explorer_paths(t, t.index(2, 2), t.index(5, 5))
    assert explorer_success(ep, set())
    one = set(ep.paths[0][1:2])
    assert explorer_success(ep, one)
    two = {ep.paths[0][1], ep.paths[1][1]}
    assert not explorer_success(ep, two)
    # endpoints do not count as interior hits
    assert explorer_success(ep, {ep.a, ep.b})


def test_explorer_estimate_no_byz():
    cfg = ExperimentConfig("torus", 10, EXPLORER, 0, 30, seed=9)
    est = estimate_P(cfg)
    assert est.p_hat == 1.0
    assert est.p_exists is None and est.mean_reliable_frac is None
