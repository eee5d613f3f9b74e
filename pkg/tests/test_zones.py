import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zonecast import (
    ZoneSet,
    build_grid,
    build_torus,
    ctr_order,
    fragment_zone,
    my_ctr,
    square_zone,
    validate_zone,
)


def coords(topo, idxs):
    return {topo.coord(v) for v in idxs}


def test_square_zone_border_size(torus10):
    z = square_zone(torus10, 1, 1, 3)
    assert len(z.border) == 16
    assert len(z.core) == 9


def test_square_zone_smallest(torus10):
    z = square_zone(torus10, 1, 1, 1)
    assert coords(torus10, z.core) == {(2, 2)}
    assert coords(torus10, z.border) == {
        (1, 1), (1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2), (3, 3)
    }


def test_square_zone_wraps(torus10):
    z = square_zone(torus10, 9, 9, 2)
    assert coords(torus10, z.core) == {(10, 10), (10, 1), (1, 10), (1, 1)}


def test_square_zone_width_cap():
    t = build_torus(5)
    with pytest.raises(ValueError):
        square_zone(t, 1, 1, 4)  # w + 2 > N
    with pytest.raises(ValueError):
        square_zone(t, 1, 1, 0)


def test_square_zone_valid_by_construction(torus10):
    for anchor, w in [((1, 1), 1), ((9, 9), 2), ((5, 7), 3), ((10, 2), 1)]:
        assert validate_zone(torus10, square_zone(torus10, *anchor, w))


def test_validate_rejects_leak(torus10):
    from zonecast import ControlZone

    z = square_zone(torus10, 2, 2, 2)
    # dropping a border node that touches the core opens a leak; dropping a
    # ring corner (diagonal to the core) would still validate
    hole = torus10.index(2, 3)
    assert hole in z.border
    broken = ControlZone(z.key, z.core, z.border - {hole})
    assert not validate_zone(torus10, broken)
    corner = torus10.index(2, 2)
    still_ok = ControlZone(z.key, z.core, z.border - {corner})
    assert validate_zone(torus10, still_ok)


def test_ctr_order_torus_counts():
    t = build_torus(100)
    zs = ctr_order(t, 3)
    assert zs.n_ctr == 30_000
    assert zs.n_border == 16
    # every node borders exactly 4(w+1) zones of each width w
    assert len(my_ctr(zs, t.index(37, 81))) == sum(4 * (w + 1) for w in (1, 2, 3))


def test_ctr_order_torus_n10_w1(torus10, torus10_w1):
    assert torus10_w1.n_ctr == 100
    assert all(len(z.core) == 1 for z in torus10_w1.zones)


def test_ctr_order_precondition():
    t = build_torus(4)
    with pytest.raises(ValueError):
        ctr_order(t, 3)  # W + 2 > N
    with pytest.raises(ValueError):
        ctr_order(t, 0)


def test_my_ctr_width1(torus10, torus10_w1):
    assert len(my_ctr(torus10_w1, torus10.index(5, 5))) == 8


def test_my_ctr_empty_zoneset(torus10):
    zs = ZoneSet(torus10, [])
    assert my_ctr(zs, 0) == frozenset()
    assert zs.n_border == 0


def test_index_coherence(torus8, torus8_w2):
    zs = torus8_w2
    for zid, z in enumerate(zs.zones):
        for v in z.core:
            assert zid in zs.by_core[v]
        for v in z.border:
            assert zid in zs.by_border[v]
    for v in range(torus8.n):
        for zid in zs.by_core[v]:
            assert v in zs.zones[zid].core
        for zid in zs.by_border[v]:
            assert v in zs.zones[zid].border


def test_edge_requirements_match_definition(torus8, torus8_w2):
    zs = torus8_w2
    ereq = zs.edge_requirements
    for p in range(torus8.n):
        for q in torus8.neighbors[p]:
            expected = sorted(
                zid for zid in zs.by_border[p] if q in zs.zones[zid].core
            )
            assert list(ereq.get((p, q), ())) == expected


# --- grid fragmentation -------------------------------------------------------


def test_fragment_interior_zone_unchanged(grid10):
    torus = build_torus(10)
    z = square_zone(torus, 3, 3, 2)
    frags = fragment_zone(grid10, z)
    assert len(frags) == 1
    assert frags[0].core == z.core and frags[0].border == z.border
    assert frags[0].key == z.key + (0,)


def test_fragment_seam_zone_splits_in_two(grid10):
    torus = build_torus(10)
    frags = fragment_zone(grid10, square_zone(torus, 9, 3, 2))
    assert len(frags) == 2
    assert all(validate_zone(grid10, f) for f in frags)


def test_fragment_corner_zone_splits_in_four(grid10):
    torus = build_torus(10)
    frags = fragment_zone(grid10, square_zone(torus, 9, 9, 2))
    assert len(frags) == 4
    assert all(validate_zone(grid10, f) for f in frags)


def test_fragment_keys_are_fresh_and_deterministic(grid10):
    torus = build_torus(10)
    z = square_zone(torus, 9, 9, 2)
    frags = fragment_zone(grid10, z)
    assert [f.key for f in frags] == [z.key + (k,) for k in range(4)]


def test_grid_ctr_order_all_valid():
    g = build_grid(8)
    zs = ctr_order(g, 2)
    assert all(validate_zone(g, z) for z in zs.zones)
    # width-1 cores never split, so each contributes exactly one fragment;
    # width-2 seam zones add extras
    w1 = [z for z in zs.zones if z.key[2] == 1]
    assert len(w1) == 64


def test_grid_edge_fragment_l_shape(grid10):
    # width-1 zone whose core lands on the grid corner: the surviving border
    # is the 3-node L and the boundary completes the cut
    torus = build_torus(10)
    z = square_zone(torus, 10, 10, 1)
    frags = fragment_zone(grid10, z)
    assert len(frags) == 1
    f = frags[0]
    assert coords(grid10, f.core) == {(1, 1)}
    assert coords(grid10, f.border) == {(1, 2), (2, 2), (2, 1)}
    assert validate_zone(grid10, f)


def test_zone_dump_format(torus10, torus10_w1):
    text = torus10_w1.dump()
    first = text.split("\n")[0]
    assert first.startswith("zone 0 (1, 1, 1): core=[2,2] border=[")


# --- properties ---------------------------------------------------------------


@given(st.integers(min_value=4, max_value=9), st.integers(min_value=1, max_value=3))
@settings(max_examples=15)
def test_torus_family_counts_and_validity(N, W):
    if W + 2 > N:
        return
    t = build_torus(N)
    zs = ctr_order(t, W)
    assert zs.n_ctr == N * N * W
    for z in zs.zones:
        w = z.key[2]
        assert len(z.core) == w * w
        assert len(z.border) == 4 * (w + 1)
        assert validate_zone(t, z)


@given(st.integers(min_value=4, max_value=8), st.integers(min_value=1, max_value=2))
@settings(max_examples=10)
def test_grid_fragments_all_valid(N, W):
    if W + 2 > N:
        return
    g = build_grid(N)
    zs = ctr_order(g, W)
    assert all(validate_zone(g, z) for z in zs.zones)
