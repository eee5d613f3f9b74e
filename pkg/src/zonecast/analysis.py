"""Omniscient-observer analysis: safe, communicating and reliable node sets.

Given the full topology, the zone family and the Byzantine positions (a
global vantage point no protocol node needs), this module computes:

* a *safe cover*: a set of zones whose cores swallow every Byzantine node
  while the union of cores stays disjoint from the union of borders; every
  node outside the cores is then safe (never accepts a false message),
* the *communicating set* grown from a seed node: nodes reachable by
  repeatedly admitting a correct neighbor v of the current set once, for
  every zone putting the relaying neighbor in its core and v on its border,
  some already-admitted node can be reached from v along correct border
  nodes of that zone (those paths carry the needed authorizations in every
  schedule),
* the *reliable set*: the intersection of the two.

The cover search is a greedy backtracking heuristic; failure to find a cover
never proves absence, which keeps Monte Carlo results a lower bound.  The
separate exhaustive search settles existence definitively on desk-scale
instances and serves as the heuristic's oracle.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .topology import Topology
from .zones import ZoneSet


@dataclass(frozen=True)
class SafeCover:
    zone_ids: frozenset[int]
    cores_union: frozenset[int]
    borders_union: frozenset[int]


@dataclass(frozen=True)
class CoverSearch:
    """Outcome of the exhaustive search: decisive or explicitly capped."""

    status: str  # "cover" | "none" | "inconclusive"
    cover: SafeCover | None
    steps: int


@dataclass(frozen=True)
class AnalysisResult:
    safe: frozenset[int]
    communicating: frozenset[int]
    reliable: frozenset[int]
    cover: SafeCover | None


def _candidate_zones(zs: ZoneSet, byz: frozenset[int]) -> list[int]:
    """Zones that could belong to a cover: core holds at least one Byzantine
    node, border holds none.

    Restricting the search to these is lossless: a zone with a Byzantine-free
    core adds nothing to coverage and can be dropped from any valid cover,
    and a zone with a Byzantine border member can never appear in one (that
    node would have to be in the cores too, breaking disjointness).
    """
    cand: set[int] = set()
    for b in byz:
        cand.update(zs.by_core[b])
    borders = zs.borders
    return [z for z in sorted(cand) if byz.isdisjoint(borders[z])]


def _as_cover(zs: ZoneSet, chosen: Iterable[int]) -> SafeCover:
    ids = frozenset(chosen)
    cores: set[int] = set()
    borders: set[int] = set()
    for z in ids:
        cores |= zs.cores[z]
        borders |= zs.borders[z]
    return SafeCover(zone_ids=ids, cores_union=frozenset(cores),
                     borders_union=frozenset(borders))


def validate_cover(zs: ZoneSet, cover: SafeCover, byz: Iterable[int]) -> bool:
    """Post-hoc check of the cover conditions, independent of any search."""
    cores: set[int] = set()
    borders: set[int] = set()
    for z in cover.zone_ids:
        if not (0 <= z < zs.n_ctr):
            return False
        cores |= zs.cores[z]
        borders |= zs.borders[z]
    if cores != set(cover.cores_union) or borders != set(cover.borders_union):
        return False
    if cores & borders:
        return False
    return all(b in cores for b in byz)


def find_safe_cover(topo: Topology, zs: ZoneSet, byz: Iterable[int],
                    budget: int = 10_000) -> SafeCover | None:
    """Greedy backtracking cover search.

    Repeatedly takes the lowest-index uncovered Byzantine node and tries the
    candidate zones covering it, smallest core first, rejecting any zone
    whose core meets the running borders-union or whose border meets the
    running cores-union.  Backtracks on dead ends until ``budget`` candidate
    attempts are spent.  Returns None when no cover was found -- which, by
    design, does not prove that none exists.
    """
    byz_f = frozenset(byz)
    if not byz_f:
        return _as_cover(zs, ())
    cand = _candidate_zones(zs, byz_f)
    cores = zs.cores
    borders = zs.borders
    cand.sort(key=lambda z: (len(cores[z]), z))
    covering: dict[int, list[int]] = {b: [] for b in byz_f}
    for z in cand:
        for b in cores[z] & byz_f:
            covering[b].append(z)
    if any(not zl for zl in covering.values()):
        return None
    byz_order = sorted(byz_f)

    chosen: list[int] = []
    cores_u: set[int] = set()
    borders_u: set[int] = set()
    steps = 0

    def next_uncovered() -> int | None:
        for b in byz_order:
            if b not in cores_u:
                return b
        return None

    def dfs() -> bool:
        nonlocal steps
        b = next_uncovered()
        if b is None:
            return True
        for z in covering[b]:
            if steps >= budget:
                return False
            steps += 1
            core, border = cores[z], borders[z]
            if not core.isdisjoint(borders_u) or not border.isdisjoint(cores_u):
                continue
            core_delta = core - cores_u
            border_delta = border - borders_u
            chosen.append(z)
            cores_u.update(core_delta)
            borders_u.update(border_delta)
            if dfs():
                return True
            chosen.pop()
            cores_u.difference_update(core_delta)
            borders_u.difference_update(border_delta)
            if steps >= budget:
                return False
        return False

    if not dfs():
        return None
    cover = _as_cover(zs, chosen)
    if not validate_cover(zs, cover, byz_f):  # search bug, never expected
        raise RuntimeError("cover search produced an invalid cover")
    return cover


def exhaustive_safe_cover(topo: Topology, zs: ZoneSet, byz: Iterable[int],
                          limit: int = 1_000_000) -> CoverSearch:
    """Exact cover existence over all candidate-zone subsets, budget-capped.

    Complete search: every valid cover can be thinned to one in which each
    zone covers some Byzantine node, so branching on all candidates covering
    the first uncovered node (in plain id order, no heuristics) visits a
    valid cover whenever one exists.  ``limit`` caps visited search nodes;
    when exceeded the result is explicitly inconclusive, never a silent
    "none".  Intended for desk-scale instances.
    """
    byz_f = frozenset(byz)
    if not byz_f:
        return CoverSearch("cover", _as_cover(zs, ()), 0)
    cand = _candidate_zones(zs, byz_f)
    cores = zs.cores
    borders = zs.borders
    byz_order = sorted(byz_f)

    picked: list[int] = []
    steps = 0
    capped = False

    def search(cores_u: frozenset[int], borders_u: frozenset[int]) -> bool:
        nonlocal steps, capped
        target = None
        for b in byz_order:
            if b not in cores_u:
                target = b
                break
        if target is None:
            return True
        for z in cand:
            if target not in cores[z]:
                continue
            steps += 1
            if steps > limit:
                capped = True
                return False
            if not cores[z].isdisjoint(borders_u) or not borders[z].isdisjoint(cores_u):
                continue
            picked.append(z)
            if search(cores_u | cores[z], borders_u | borders[z]):
                return True
            picked.pop()
            if capped:
                return False
        return False

    found = search(frozenset(), frozenset())
    if found:
        cover = _as_cover(zs, picked)
        if not validate_cover(zs, cover, byz_f):
            raise RuntimeError("exhaustive search produced an invalid cover")
        return CoverSearch("cover", cover, steps)
    if capped:
        return CoverSearch("inconclusive", None, steps)
    return CoverSearch("none", None, steps)


def safe_set(topo: Topology, cover: SafeCover) -> frozenset[int]:
    """All nodes outside the cover's cores (callers intersect with the correct
    nodes when needed)."""
    if cover.cores_union & cover.borders_union:
        raise ValueError("invalid cover: cores and borders overlap")
    return frozenset(range(topo.n)) - cover.cores_union


def build_communicating_set(topo: Topology, zs: ZoneSet, byz: Iterable[int],
                            seed_node: int) -> frozenset[int]:
    """Grow the communicating set from ``seed_node`` to its fixpoint.

    A correct node v joins when it has an already-admitted neighbor u such
    that, for every zone z with u in core(z) and v in border(z), v reaches
    some admitted node along correct nodes of border(z).  Admissions create
    new path endpoints, so previously failed candidates are re-examined
    whenever the set grew; the fixpoint itself does not depend on admission
    order (the admission condition is monotone in the set).
    """
    byz_f = frozenset(byz)
    if seed_node in byz_f:
        raise ValueError(f"seed node {seed_node} is Byzantine")
    n = topo.n
    if not (0 <= seed_node < n):
        raise ValueError(f"unknown node index {seed_node}")
    nbrs = topo.neighbors
    ereq = zs.edge_requirements
    borders = zs.borders
    cores = zs.cores

    in_s = bytearray(n)
    in_s[seed_node] = 1
    members: list[int] = [seed_node]

    def border_path_reaches(v: int, zone: int) -> bool:
        border = borders[zone]
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for y in nbrs[x]:
                if y in border and y not in byz_f and y not in seen:
                    if in_s[y]:
                        return True
                    seen.add(y)
                    stack.append(y)
        return False

    def zone_satisfied(v: int, zone: int) -> bool:
        # A zone whose core still contains the whole set imposes no path
        # obligation: every member is exempt from its authorization (the
        # source sits inside the core), and its border holds no member the
        # new node would have to reach.  This is also what lets a singleton
        # set grow at all -- the seed lies in the core of the first gating
        # zone, never on its border.
        core = cores[zone]
        if len(members) <= len(core) and all(x in core for x in members):
            return True
        return border_path_reaches(v, zone)

    def admissible(v: int) -> bool:
        for u in nbrs[v]:
            if not in_s[u]:
                continue
            gating = ereq.get((v, u))
            if not gating:
                return True
            if all(zone_satisfied(v, z) for z in gating):
                return True
        return False

    work = deque(q for q in nbrs[seed_node] if q not in byz_f)
    in_work = set(work)
    failed: set[int] = set()
    while True:
        admitted_any = False
        while work:
            v = work.popleft()
            in_work.discard(v)
            if in_s[v]:
                continue
            if admissible(v):
                in_s[v] = 1
                members.append(v)
                admitted_any = True
                for q in nbrs[v]:
                    if not in_s[q] and q not in byz_f and q not in in_work:
                        work.append(q)
                        in_work.add(q)
            else:
                failed.add(v)
        if admitted_any and failed:
            for v in sorted(failed):
                work.append(v)
                in_work.add(v)
            failed.clear()
            continue
        break
    return frozenset(v for v in range(n) if in_s[v])


def reliable_set(safe: Iterable[int], communicating: Iterable[int]) -> frozenset[int]:
    """Safe-and-communicating nodes: the intersection."""
    return frozenset(safe) & frozenset(communicating)


def analyze(topo: Topology, zs: ZoneSet, byz: Iterable[int], seed_node: int,
            budget: int = 10_000) -> AnalysisResult:
    """Cover search, then the two node sets and their intersection.

    Without a cover there is no safety certificate: safe and reliable come
    back empty (lower-bound semantics), and the communicating set is not
    built at all.
    """
    byz_f = frozenset(byz)
    cover = find_safe_cover(topo, zs, byz_f, budget=budget)
    if cover is None:
        return AnalysisResult(frozenset(), frozenset(), frozenset(), None)
    safe = safe_set(topo, cover)
    communicating = build_communicating_set(topo, zs, byz_f, seed_node)
    return AnalysisResult(safe, communicating, reliable_set(safe, communicating), cover)
