from collections import deque

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zonecast import build_grid, build_torus, is_connected, isolates, square_zone


def coords(topo, idxs):
    return {topo.coord(v) for v in idxs}


def test_torus_n3_regular():
    t = build_torus(3)
    assert t.n == 9
    assert all(t.degree(v) == 4 for v in range(t.n))


def test_torus_100_node_count():
    t = build_torus(100)
    assert t.n == 10_000


def test_torus_wrap_neighbors():
    t = build_torus(4)
    nbrs = coords(t, t.neighbors[t.index(1, 1)])
    assert nbrs == {(1, 2), (1, 4), (2, 1), (4, 1)}


def test_torus_too_small():
    with pytest.raises(ValueError):
        build_torus(2)


def test_grid_corner():
    g = build_grid(3)
    assert coords(g, g.neighbors[g.index(1, 1)]) == {(1, 2), (2, 1)}


def test_grid_n2_all_degree_2():
    g = build_grid(2)
    assert g.n == 4
    assert all(g.degree(v) == 2 for v in range(4))


def test_grid_too_small():
    with pytest.raises(ValueError):
        build_grid(1)


def edge_set(topo):
    return {frozenset((v, q)) for v in range(topo.n) for q in topo.neighbors[v]}


def test_grid_is_edge_cut_of_torus():
    t, g = build_torus(100), build_grid(100)
    et, eg = edge_set(t), edge_set(g)
    assert eg < et
    assert t.n == g.n


def test_is_connected_singleton_and_empty(torus10):
    assert is_connected(torus10, set())
    assert is_connected(torus10, {torus10.index(1, 1)})


def test_is_connected_gap():
    g = build_grid(5)
    assert not is_connected(g, {g.index(1, 1), g.index(1, 3)})


def test_is_connected_zone_border(torus10):
    border = square_zone(torus10, 1, 1, 3).border
    assert len(border) == 16
    assert is_connected(torus10, border)


def test_is_connected_unknown_node(torus10):
    with pytest.raises(ValueError):
        is_connected(torus10, {torus10.n + 5})


def ring_around(topo, i, j):
    return {
        topo.index((i + di - 1) % topo.N + 1, (j + dj - 1) % topo.N + 1)
        for di in (-1, 0, 1)
        for dj in (-1, 0, 1)
        if (di, dj) != (0, 0)
    }


def test_isolates_full_perimeter(torus10):
    core = {torus10.index(3, 3)}
    assert isolates(torus10, ring_around(torus10, 3, 3), core)


def test_isolates_leaky_perimeter(torus10):
    core = {torus10.index(3, 3)}
    ring = ring_around(torus10, 3, 3)
    ring.discard(torus10.index(2, 3))
    assert not isolates(torus10, ring, core)


def test_isolates_overlap_rejected(torus10):
    v = torus10.index(3, 3)
    with pytest.raises(ValueError):
        isolates(torus10, {v}, {v})


def test_isolates_grid_boundary_completes():
    # corner core; L-shaped border plus the grid boundary isolates it
    g = build_grid(10)
    core = {g.index(1, 1)}
    border = {g.index(1, 2), g.index(2, 2), g.index(2, 1)}
    assert isolates(g, border, core)
    assert not isolates(g, border - {g.index(2, 1)}, core)


def test_adjacency_dump_format():
    g = build_grid(2)
    lines = g.dump_adjacency().strip().split("\n")
    assert lines[0] == "1,1: 2,1 1,2"
    assert len(lines) == 4


# --- properties --------------------------------------------------------------

sides = st.integers(min_value=3, max_value=12)


@given(sides, st.sampled_from(["torus", "grid"]))
def test_adjacency_symmetric(N, kind):
    topo = build_torus(N) if kind == "torus" else build_grid(N)
    for v in range(topo.n):
        for q in topo.neighbors[v]:
            assert v in topo.neighbors[q]


@given(sides)
def test_torus_regularity(N):
    t = build_torus(N)
    assert all(t.degree(v) == 4 for v in range(t.n))


@given(sides)
def test_grid_edges_subset_of_torus(N):
    assert edge_set(build_grid(N)) <= edge_set(build_torus(N))


def reachable_avoiding(topo, start_set, removed):
    seen = set(start_set)
    dq = deque(seen)
    while dq:
        v = dq.popleft()
        for q in topo.neighbors[v]:
            if q not in removed and q not in seen:
                seen.add(q)
                dq.append(q)
    return seen


@given(st.integers(min_value=4, max_value=8), st.data())
def test_isolates_agrees_with_reachability(N, data):
    # independent oracle: remove the border, BFS from outside, check the core
    t = build_torus(N)
    nodes = list(range(t.n))
    core = set(data.draw(st.sets(st.sampled_from(nodes), min_size=1, max_size=3)))
    rest = [v for v in nodes if v not in core]
    border = set(data.draw(st.sets(st.sampled_from(rest), min_size=0, max_size=10)))
    outside = set(nodes) - core - border
    if outside:
        reached = reachable_avoiding(t, outside, border)
        expected = not (reached & core)
    else:
        expected = True
    assert isolates(t, border, core) == expected
