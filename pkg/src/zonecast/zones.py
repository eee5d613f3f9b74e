"""Control zones: (core, border) pairs whose border is a node-cut.

Provides square zones on the torus, the order-W family (all square zones of
widths 1..W at every anchor), and the fragmentation of torus zones onto the
companion grid, where the removed wrap edges may split a zone into several
smaller valid zones.

Zone identity is two-layered: every zone carries a structured ``key``
(anchor + width, plus a fragment ordinal on grids) and a ZoneSet assigns
dense integer ids (list positions) that the protocol and analysis use.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .topology import Topology, build_torus, is_connected, isolates


@dataclass(frozen=True)
class ControlZone:
    """Disjoint, connected core and border node sets (linear indices).

    key: (i0, j0, w) for torus squares, (i0, j0, w, k) for grid fragments.
    """

    key: tuple
    core: frozenset[int]
    border: frozenset[int]


def square_zone(topo: Topology, i0: int, j0: int, w: int) -> ControlZone:
    """Width-w square zone anchored at (i0, j0): a w x w core inside the
    perimeter of the (w+2) x (w+2) square, 4(w+1) border nodes.

    Coordinates wrap modulo N on a torus; on a grid the square must fit
    entirely inside the boundary.
    """
    N = topo.N
    if w < 1:
        raise ValueError(f"zone width must be >= 1, got {w}")
    if w + 2 > N:
        raise ValueError(f"width {w} + 2 exceeds side {N}: border cannot be a node-cut")
    wrap = topo.kind == "torus"
    if wrap:
        i0 = (i0 - 1) % N + 1
        j0 = (j0 - 1) % N + 1
    elif not (1 <= i0 and i0 + w + 1 <= N and 1 <= j0 and j0 + w + 1 <= N):
        raise ValueError(f"square zone ({i0},{j0},w={w}) crosses the grid boundary")

    def at(i: int, j: int) -> int:
        if wrap:
            i = (i - 1) % N + 1
            j = (j - 1) % N + 1
        return (i - 1) * N + (j - 1)

    core = frozenset(
        at(i, j) for i in range(i0 + 1, i0 + w + 1) for j in range(j0 + 1, j0 + w + 1)
    )
    border = set()
    for j in range(j0, j0 + w + 2):
        border.add(at(i0, j))
        border.add(at(i0 + w + 1, j))
    for i in range(i0 + 1, i0 + w + 1):
        border.add(at(i, j0))
        border.add(at(i, j0 + w + 1))
    return ControlZone(key=(i0, j0, w), core=core, border=frozenset(border))


def validate_zone(topo: Topology, zone: ControlZone) -> bool:
    """Generic zone validity: disjoint, each part connected, border isolates core."""
    if zone.core & zone.border:
        return False
    if not is_connected(topo, zone.core):
        return False
    if not is_connected(topo, zone.border):
        return False
    return isolates(topo, zone.border, zone.core)


def _components(topo: Topology, nodes: frozenset[int]) -> list[frozenset[int]]:
    """Connected components of the induced subgraph, sorted by smallest member."""
    remaining = set(nodes)
    comps = []
    nbrs = topo.neighbors
    while remaining:
        start = min(remaining)
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for q in nbrs[v]:
                if q in remaining and q not in comp:
                    comp.add(q)
                    stack.append(q)
        remaining -= comp
        comps.append(frozenset(comp))
    return sorted(comps, key=min)


def fragment_zone(grid: Topology, zone: ControlZone) -> list[ControlZone]:
    """Split a torus zone along the grid's missing wrap edges.

    The core falls apart into grid-connected components; each component keeps
    the border component(s) that still touch it (the grid boundary completes
    the isolation where border pieces were cut away).  Fragments that fail
    generic validation -- e.g. because their border ends up disconnected --
    are dropped.  Fragment keys extend the parent key with an ordinal.
    """
    core_comps = _components(grid, zone.core)
    border_comps = _components(grid, zone.border)
    nbrs = grid.neighbors
    out = []
    for k, comp in enumerate(core_comps):
        ring = {q for v in comp for q in nbrs[v]} - comp
        # Ring nodes are always original border nodes: grid adjacency is a
        # subset of torus adjacency and other core components are not adjacent.
        frag_border = frozenset().union(*(b for b in border_comps if b & ring)) if ring else frozenset()
        frag = ControlZone(key=zone.key + (k,), core=comp, border=frag_border)
        if validate_zone(grid, frag):
            out.append(frag)
    return out


class ZoneSet:
    """An indexed family of control zones over one topology.

    ``by_core[p]`` / ``by_border[p]`` list the dense zone ids whose core /
    border contains node p (ascending).  ``n_border`` is the largest border
    cardinality in the family (0 when empty).
    """

    def __init__(self, topo: Topology, zones: list[ControlZone]):
        self.topo = topo
        self.zones: tuple[ControlZone, ...] = tuple(zones)
        self.cores: tuple[frozenset[int], ...] = tuple(z.core for z in self.zones)
        self.borders: tuple[frozenset[int], ...] = tuple(z.border for z in self.zones)
        by_core: list[list[int]] = [[] for _ in range(topo.n)]
        by_border: list[list[int]] = [[] for _ in range(topo.n)]
        for zid, z in enumerate(self.zones):
            for v in z.core:
                by_core[v].append(zid)
            for v in z.border:
                by_border[v].append(zid)
        self.by_core: tuple[tuple[int, ...], ...] = tuple(tuple(x) for x in by_core)
        self.by_border: tuple[tuple[int, ...], ...] = tuple(tuple(x) for x in by_border)
        self.n_ctr = len(self.zones)
        self.n_border = max((len(z.border) for z in self.zones), default=0)
        self.key_to_id = {z.key: zid for zid, z in enumerate(self.zones)}

    @cached_property
    def edge_requirements(self) -> dict[tuple[int, int], tuple[int, ...]]:
        """For each adjacent pair, the zones that gate the EXIT rule.

        Maps (p, q) -> zone ids z with p in border(z) and q in core(z); these
        are exactly the authorizations node p must hold before accepting a
        standard message relayed by neighbor q (when the source is outside
        core(z)).  Pairs with no gating zones are absent.
        """
        req: dict[tuple[int, int], list[int]] = {}
        nbrs = self.topo.neighbors
        for zid, z in enumerate(self.zones):
            border = z.border
            for q in z.core:
                for p in nbrs[q]:
                    if p in border:
                        req.setdefault((p, q), []).append(zid)
        return {pq: tuple(zids) for pq, zids in req.items()}

    def my_ctr(self, p: int) -> tuple[int, ...]:
        """Zone ids whose border contains p (ascending)."""
        return self.by_border[p]

    def dump(self) -> str:
        """Debug format: ``zone <id>: core=[...] border=[...]`` with coordinates."""
        coord = self.topo.coord
        lines = []
        for zid, z in enumerate(self.zones):
            core = " ".join("%d,%d" % coord(v) for v in sorted(z.core))
            border = " ".join("%d,%d" % coord(v) for v in sorted(z.border))
            lines.append(f"zone {zid} {z.key}: core=[{core}] border=[{border}]")
        return "\n".join(lines) + "\n"


def ctr_order(topo: Topology, W: int) -> ZoneSet:
    """The order-W zone family: every square zone of width 1..W at every anchor.

    On a torus this is exactly N*N*W zones.  On a grid, the torus family of
    the same side is fragmented by the removed wrap edges and only valid
    fragments are retained.
    """
    if W < 1:
        raise ValueError(f"order must be >= 1, got {W}")
    if W + 2 > topo.N:
        raise ValueError(f"order {W} + 2 exceeds side {topo.N}")
    N = topo.N
    if topo.kind == "torus":
        zones = [
            square_zone(topo, i0, j0, w)
            for w in range(1, W + 1)
            for i0 in range(1, N + 1)
            for j0 in range(1, N + 1)
        ]
        return ZoneSet(topo, zones)
    torus = build_torus(N)
    zones = []
    for w in range(1, W + 1):
        for i0 in range(1, N + 1):
            for j0 in range(1, N + 1):
                zones.extend(fragment_zone(topo, square_zone(torus, i0, j0, w)))
    return ZoneSet(topo, zones)


def my_ctr(zs: ZoneSet, p: int) -> frozenset[int]:
    """Zones on whose border node p sits (the node's static protocol attribute)."""
    return frozenset(zs.by_border[p])
