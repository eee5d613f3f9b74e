"""Torus and grid network topologies plus the connectivity primitives.

Nodes are identified by 1-based coordinates (i, j) and, internally, by the
dense linear index (i - 1) * N + (j - 1).  All set-valued machinery in the
rest of the package works on linear indices; coordinates appear at the
boundaries (CLI, placement files, trace export).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

Coord = tuple[int, int]


@dataclass(frozen=True)
class Topology:
    """Immutable node set + adjacency for an N x N torus or grid.

    ``neighbors[idx]`` lists adjacent linear indices in the fixed order
    up, down, left, right (entries missing on grid boundaries), which keeps
    traces deterministic under a fixed seed.
    """

    kind: str  # "torus" | "grid"
    N: int
    neighbors: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return self.N * self.N

    def index(self, i: int, j: int) -> int:
        if not (1 <= i <= self.N and 1 <= j <= self.N):
            raise ValueError(f"coordinate ({i},{j}) outside 1..{self.N}")
        return (i - 1) * self.N + (j - 1)

    def coord(self, idx: int) -> Coord:
        if not (0 <= idx < self.n):
            raise ValueError(f"node index {idx} outside 0..{self.n - 1}")
        return (idx // self.N + 1, idx % self.N + 1)

    def degree(self, idx: int) -> int:
        return len(self.neighbors[idx])

    def dump_adjacency(self) -> str:
        """Debug format, one line per node: ``i,j: i1,j1 i2,j2 ...``."""
        lines = []
        for idx in range(self.n):
            i, j = self.coord(idx)
            nbrs = " ".join("%d,%d" % self.coord(q) for q in self.neighbors[idx])
            lines.append(f"{i},{j}: {nbrs}")
        return "\n".join(lines) + "\n"


def _build(kind: str, N: int) -> Topology:
    wrap = kind == "torus"
    N2 = N * N
    adj: list[tuple[int, ...]] = []
    for idx in range(N2):
        i, j = idx // N + 1, idx % N + 1
        out = []
        # up, down, left, right
        for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            ii, jj = i + di, j + dj
            if wrap:
                ii = (ii - 1) % N + 1
                jj = (jj - 1) % N + 1
            elif not (1 <= ii <= N and 1 <= jj <= N):
                continue
            out.append((ii - 1) * N + (jj - 1))
        adj.append(tuple(out))
    return Topology(kind=kind, N=N, neighbors=tuple(adj))


def build_torus(N: int) -> Topology:
    """N x N torus: row/column neighbors with wrap-around at the extremities.

    N >= 3 so that wrapping never duplicates an edge.
    """
    if N < 3:
        raise ValueError(f"torus side must be >= 3, got {N}")
    return _build("torus", N)


def build_grid(N: int) -> Topology:
    """N x N grid: the torus minus its wrap edges; corners have degree 2."""
    if N < 2:
        raise ValueError(f"grid side must be >= 2, got {N}")
    return _build("grid", N)


def _check_nodes(topo: Topology, nodes: Iterable[int]) -> frozenset[int]:
    s = frozenset(nodes)
    for v in s:
        if not (0 <= v < topo.n):
            raise ValueError(f"unknown node index {v}")
    return s


def is_connected(topo: Topology, nodes: Iterable[int]) -> bool:
    """True iff the subgraph induced by ``nodes`` is connected.

    Empty and singleton sets count as connected.
    """
    s = _check_nodes(topo, nodes)
    if len(s) <= 1:
        return True
    start = next(iter(s))
    seen = {start}
    queue = deque((start,))
    nbrs = topo.neighbors
    while queue:
        v = queue.popleft()
        for q in nbrs[v]:
            if q in s and q not in seen:
                seen.add(q)
                queue.append(q)
    return len(seen) == len(s)


def isolates(topo: Topology, border: Iterable[int], core: Iterable[int]) -> bool:
    """True iff removing ``border`` cuts ``core`` off from the rest of the graph.

    Equivalent local formulation: every neighbor of a core node lies in
    core or border.  Any outside path into the core would have to take its
    final hop from such a neighbor, so checking the ring suffices and the
    cost stays local to the zone rather than O(n).
    """
    b = _check_nodes(topo, border)
    c = _check_nodes(topo, core)
    if b & c:
        raise ValueError("border and core overlap")
    nbrs = topo.neighbors
    for v in c:
        for q in nbrs[v]:
            if q not in b and q not in c:
                return False
    return True
