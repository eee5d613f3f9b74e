"""Monte Carlo estimation of the reliable-communication probability.

One trial places the configured number of Byzantine nodes uniformly at
random, samples a random node pair, constructs one reliable node set via the
cover search + communicating fixpoint, and scores the trial a success when
both endpoints land in that set.  Aggregating trials estimates P(n_B); the
single constructed set need not be the best one, so the estimate is a lower
bound on the true probability.

A configurable fraction of trials additionally executes the full simulator
against a default forging adversary and audits the analysis claims
end-to-end (every reliable pair exchanged payloads, no certified-safe node
accepted a forgery, traffic stayed under the complexity ceiling).

The modified-Explorer baseline is also here: four fixed node-disjoint paths
per pair, success iff Byzantine nodes touch at most one of them.

Trials are independent: each derives its own RNG stream from (master seed,
trial index), so aggregation is order-independent and results reproduce
bit-for-bit.
"""

from __future__ import annotations

import hashlib
import math
import os
import random
import statistics
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from . import analysis as _analysis
from . import simulator as _simulator
from .topology import Topology, build_grid, build_torus
from .zones import ZoneSet, ctr_order

EXPLORER = "explorer"


def derive_seed(master: int, *parts) -> int:
    """Stable 63-bit stream seed from a master seed and arbitrary labels."""
    text = ":".join([str(master)] + [str(p) for p in parts])
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


@dataclass(frozen=True)
class ExperimentConfig:
    """One estimation point: topology, zone order, Byzantine count, trials."""

    kind: str               # "torus" | "grid"
    N: int
    order: int | str        # zone order W, or "explorer" for the baseline
    n_b: int
    trials: int
    seed: int
    crosscheck: float = 0.01
    backtrack_budget: int = 10_000
    pair_mode: str = "all"  # "all" | "correct-only"
    trace_dir: str | None = None  # export cross-checked simulation traces here

    def __post_init__(self):
        if self.kind not in ("torus", "grid"):
            raise ValueError(f"unknown topology kind {self.kind!r}")
        if self.order != EXPLORER and (not isinstance(self.order, int) or self.order < 1):
            raise ValueError(f"order must be a positive int or {EXPLORER!r}")
        if self.trials < 1:
            raise ValueError("trial count must be >= 1")
        if not (0 <= self.n_b < self.N * self.N):
            raise ValueError("n_b must satisfy 0 <= n_b < n")
        if self.pair_mode not in ("all", "correct-only"):
            raise ValueError(f"unknown pair mode {self.pair_mode!r}")
        if not (0.0 <= self.crosscheck <= 1.0):
            raise ValueError("crosscheck fraction must be in [0, 1]")


@dataclass
class TrialResult:
    byz: tuple[int, ...]
    pair: tuple[int, int]
    cover_found: bool
    reliable_fraction: float | None
    success: bool
    crosschecked: bool = False
    crosscheck_ok: bool | None = None
    std_sent: int | None = None
    auth_sent: int | None = None


@dataclass(frozen=True)
class Estimate:
    """Aggregated Monte Carlo point; never a bare number."""

    n_b: int
    order: int | str
    trials: int
    successes: int
    p_hat: float
    ci95: float
    p_exists: float | None          # fraction of trials with a safe cover
    exists_ci95: float | None
    mean_reliable_frac: float | None
    frac_ci95: float | None
    seed: int = 0


def _binom_ci95(p: float, k: int) -> float:
    if k <= 0:
        return 0.0
    return 1.96 * math.sqrt(p * (1.0 - p) / k)


@lru_cache(maxsize=16)
def _context(kind: str, N: int, order: int | str) -> tuple[Topology, ZoneSet | None]:
    topo = build_torus(N) if kind == "torus" else build_grid(N)
    zs = None if order == EXPLORER else ctr_order(topo, order)
    return topo, zs


def _sample_pair(rng: random.Random, n: int, byz: frozenset[int], mode: str) -> tuple[int, int]:
    if mode == "correct-only":
        correct = [p for p in range(n) if p not in byz]
        a, b = rng.sample(correct, 2)
    else:
        a, b = rng.sample(range(n), 2)
    return a, b


def _crosscheck(topo: Topology, zs: ZoneSet, byz: frozenset[int],
                result: _analysis.AnalysisResult, sim_seed: int,
                script_rng: random.Random,
                trace_path: str | None = None) -> tuple[bool, int, int]:
    """Run the simulator and audit the analysis claims on its trace."""
    scripts = _simulator.default_forging_scripts(topo, zs, byz, script_rng)
    trace = _simulator.run(topo, zs, byz, scripts, seed=sim_seed,
                           record_deliveries=trace_path is not None)
    if trace_path is not None:
        with open(trace_path, "w") as fp:
            _simulator.export_trace(trace, topo, zs, fp)
    ok = not _simulator.check_safety(trace, result.safe - byz)
    if ok:
        truth = trace.truth
        states = trace.final_states
        reliable = sorted(result.reliable)
        for q in reliable:
            acc = states[q].acc
            if any((p, truth[p]) not in acc for p in reliable):
                ok = False
                break
    d = max((len(x) for x in topo.neighbors), default=0)
    bound = complexity_bound(topo.n, d, zs.n_ctr, zs.n_border)
    if trace.std_sent + trace.auth_sent > bound:
        ok = False
    return ok, trace.std_sent, trace.auth_sent


def run_trial(cfg: ExperimentConfig, trial_index: int) -> TrialResult:
    """One Monte Carlo trial; fully determined by (cfg.seed, trial_index)."""
    topo, zs = _context(cfg.kind, cfg.N, cfg.order)
    n = topo.n
    rng = random.Random(derive_seed(cfg.seed, "trial", trial_index))
    byz = frozenset(rng.sample(range(n), cfg.n_b))
    a, b = _sample_pair(rng, n, byz, cfg.pair_mode)

    if cfg.order == EXPLORER:
        if a in byz or b in byz:
            return TrialResult(tuple(sorted(byz)), (a, b), False, None, False)
        paths = explorer_paths(topo, a, b)
        return TrialResult(tuple(sorted(byz)), (a, b), False, None,
                           explorer_success(paths, byz))

    cover = _analysis.find_safe_cover(topo, zs, byz, budget=cfg.backtrack_budget)
    if cover is None:
        return TrialResult(tuple(sorted(byz)), (a, b), False, None, False)
    safe = _analysis.safe_set(topo, cover)
    if a in byz:
        # No correct seed endpoint: the pair already failed and no
        # communicating set is built, so the trial carries no fraction.
        return TrialResult(tuple(sorted(byz)), (a, b), True, None, False)
    communicating = _analysis.build_communicating_set(topo, zs, byz, a)
    reliable = _analysis.reliable_set(safe, communicating)
    frac = len(reliable) / (n - len(byz)) if n > len(byz) else 0.0
    success = a in reliable and b in reliable
    result = TrialResult(tuple(sorted(byz)), (a, b), True, frac, success)

    if cfg.crosscheck > 0:
        every = max(1, round(1.0 / cfg.crosscheck))
        if trial_index % every == 0:
            trace_path = None
            if cfg.trace_dir is not None:
                os.makedirs(cfg.trace_dir, exist_ok=True)
                trace_path = os.path.join(cfg.trace_dir, f"trial_{trial_index}.jsonl")
            ares = _analysis.AnalysisResult(safe, communicating, reliable, cover)
            ok, std, auth = _crosscheck(
                topo, zs, byz, ares,
                sim_seed=derive_seed(cfg.seed, "sim", trial_index),
                script_rng=random.Random(derive_seed(cfg.seed, "script", trial_index)),
                trace_path=trace_path)
            result.crosschecked = True
            result.crosscheck_ok = ok
            result.std_sent = std
            result.auth_sent = auth
    return result


def estimate_P(cfg: ExperimentConfig) -> Estimate:
    """Run all trials of a config and aggregate.

    Reports the pair-success fraction with its normal-approximation 95%
    confidence half-width, the fraction of trials where a safe cover was
    found, and the mean reliable fraction over the trials that built one.
    """
    successes = 0
    covers = 0
    fracs: list[float] = []
    for t in range(cfg.trials):
        r = run_trial(cfg, t)
        if r.crosschecked and r.crosscheck_ok is False:
            raise RuntimeError(
                f"cross-check failed on trial {t} of {cfg}: analysis and simulation disagree")
        successes += r.success
        covers += r.cover_found
        if r.reliable_fraction is not None:
            fracs.append(r.reliable_fraction)
    p_hat = successes / cfg.trials
    if cfg.order == EXPLORER:
        p_exists = exists_ci = None
    else:
        p_exists = covers / cfg.trials
        exists_ci = _binom_ci95(p_exists, cfg.trials)
    mean_frac = sum(fracs) / len(fracs) if fracs else None
    if len(fracs) >= 2:
        frac_ci = 1.96 * statistics.stdev(fracs) / math.sqrt(len(fracs))
    elif fracs:
        frac_ci = 0.0
    else:
        frac_ci = None
    return Estimate(n_b=cfg.n_b, order=cfg.order, trials=cfg.trials,
                    successes=successes, p_hat=p_hat,
                    ci95=_binom_ci95(p_hat, cfg.trials),
                    p_exists=p_exists, exists_ci95=exists_ci,
                    mean_reliable_frac=mean_frac, frac_ci95=frac_ci,
                    seed=cfg.seed)


def complexity_bound(n: int, d: int, n_ctr: int, n_border: int) -> int:
    """Worst-case total messages when the whole network communicates:
    d * n * (n + n_border * n_ctr)."""
    if min(n, d, n_ctr, n_border) < 0:
        raise ValueError("complexity parameters must be >= 0")
    return d * n * (n + n_border * n_ctr)


# --- modified-Explorer baseline ---------------------------------------------


@dataclass(frozen=True)
class ExplorerPaths:
    """Fixed routes between one node pair; fewer than requested when the
    construction could not complete (grid boundary effects)."""

    a: int
    b: int
    paths: tuple[tuple[int, ...], ...]
    requested: int = 4

    @property
    def achieved(self) -> int:
        return len(self.paths)


def _axis(kind: str, N: int, x0: int, x1: int) -> tuple[int, int]:
    """(step direction, length) along one axis, shortest way round on torus."""
    if kind == "torus":
        fwd = (x1 - x0) % N
        if fwd == 0:
            return 1, 0
        if fwd <= N - fwd:
            return 1, fwd
        return -1, N - fwd
    return (1 if x1 >= x0 else -1), abs(x1 - x0)


def explorer_paths(topo: Topology, a: int, b: int) -> ExplorerPaths:
    """Up to four node-disjoint a-b paths, deterministically constructed.

    Two L-shaped paths (row-first, column-first) plus two detours shifted one
    step behind a / beyond b.  Every candidate is validated (edges exist, no
    repeats) and accepted only if its interior is disjoint from the already
    accepted ones, so an overlap can drop a path but never slip through.
    """
    if a == b:
        raise ValueError("endpoints must differ")
    N = topo.N
    wrap = topo.kind == "torus"
    ia, ja = topo.coord(a)
    ib, jb = topo.coord(b)
    si, li = _axis(topo.kind, N, ia, ib)
    sj, lj = _axis(topo.kind, N, ja, jb)

    def at(i: int, j: int) -> tuple[int, int] | None:
        if wrap:
            return ((i - 1) % N + 1, (j - 1) % N + 1)
        if 1 <= i <= N and 1 <= j <= N:
            return (i, j)
        return None

    def run_row(i: int, j_from: int, j_to: int, step: int) -> list[tuple[int, int]]:
        out = []
        j = j_from
        while True:
            out.append((i, j))
            done = (j - j_to) % N == 0 if wrap else j == j_to
            if done:
                break
            j += step
            if wrap:
                j = (j - 1) % N + 1
        return out

    def run_col(j: int, i_from: int, i_to: int, step: int) -> list[tuple[int, int]]:
        out = []
        i = i_from
        while True:
            out.append((i, j))
            done = (i - i_to) % N == 0 if wrap else i == i_to
            if done:
                break
            i += step
            if wrap:
                i = (i - 1) % N + 1
        return out

    def norm(i: int, j: int) -> tuple[int, int] | None:
        return at(i, j)

    candidates: list[list[tuple[int, int]] | None] = []

    def add_candidate(coords: list | None) -> None:
        candidates.append(coords)

    def seq(*chunks) -> list | None:
        coords: list[tuple[int, int]] = []
        for ch in chunks:
            if ch is None:
                return None
            for c in ch:
                if c is None:
                    return None
                if coords and coords[-1] == c:
                    continue
                coords.append(c)
        return coords

    if li > 0 and lj > 0:
        add_candidate(seq(run_row(ia, ja, jb, sj), run_col(jb, ia, ib, si)))
        add_candidate(seq(run_col(ja, ia, ib, si), run_row(ib, ja, jb, sj)))
        r3 = norm(ia - si, ja)
        c3 = norm(ia, jb + sj)
        if r3 and c3:
            add_candidate(seq([(ia, ja)], run_row(r3[0], ja, c3[1], sj),
                              run_col(c3[1], r3[0], ib, si), [(ib, jb)]))
        else:
            add_candidate(None)
        c4 = norm(ia, ja - sj)
        r4 = norm(ib + si, ja)
        if c4 and r4:
            add_candidate(seq([(ia, ja)], run_col(c4[1], ia, r4[0], si),
                              run_row(r4[0], c4[1], jb, sj), [(ib, jb)]))
        else:
            add_candidate(None)
    elif li == 0:
        # same row: direct, one band on each side, then the long way round
        # (torus) or a two-step band (grid)
        add_candidate(run_row(ia, ja, jb, sj))
        for d in (1, -1):
            band = norm(ia + d, ja)
            if band:
                add_candidate(seq([(ia, ja)], run_row(band[0], ja, jb, sj), [(ia, jb)]))
            else:
                add_candidate(None)
        if wrap and N - lj >= 2:
            add_candidate(run_row(ia, ja, jb, -sj))
        else:
            far = None
            for d in (1, -1):
                band = norm(ia + 2 * d, ja)
                c_in = norm(ia, ja - sj)
                c_out = norm(ia, jb + sj)
                if band and c_in and c_out:
                    far = seq([(ia, ja)], run_col(c_in[1], ia, band[0], d),
                              run_row(band[0], c_in[1], c_out[1], sj),
                              run_col(c_out[1], band[0], ia, -d), [(ia, jb)])
                    if far:
                        break
            add_candidate(far)
    else:
        # same column: mirror of the same-row case
        add_candidate(run_col(ja, ia, ib, si))
        for d in (1, -1):
            band = norm(ia, ja + d)
            if band:
                add_candidate(seq([(ia, ja)], run_col(band[1], ia, ib, si), [(ib, ja)]))
            else:
                add_candidate(None)
        if wrap and N - li >= 2:
            add_candidate(run_col(ja, ia, ib, -si))
        else:
            far = None
            for d in (1, -1):
                band = norm(ia, ja + 2 * d)
                r_in = norm(ia - si, ja)
                r_out = norm(ib + si, ja)
                if band and r_in and r_out:
                    far = seq([(ia, ja)], run_row(r_in[0], ja, band[1], d),
                              run_col(band[1], r_in[0], r_out[0], si),
                              run_row(r_out[0], band[1], ja, -d), [(ib, ja)])
                    if far:
                        break
            add_candidate(far)

    nbrs = topo.neighbors
    index = topo.index
    accepted: list[tuple[int, ...]] = []
    used_interior: set[int] = set()
    for coords in candidates:
        if not coords:
            continue
        idxs = [index(i, j) for (i, j) in coords]
        if idxs[0] != a or idxs[-1] != b:
            continue
        if len(set(idxs)) != len(idxs):
            continue
        if any(idxs[k + 1] not in nbrs[idxs[k]] for k in range(len(idxs) - 1)):
            continue
        interior = set(idxs[1:-1])
        if interior & used_interior:
            continue
        accepted.append(tuple(idxs))
        used_interior |= interior
    return ExplorerPaths(a=a, b=b, paths=tuple(accepted))


def explorer_success(paths: ExplorerPaths, byz: Iterable[int]) -> bool:
    """True iff Byzantine nodes touch the interior of at most one path."""
    byz_set = frozenset(byz)
    dirty = sum(1 for p in paths.paths if byz_set & frozenset(p[1:-1]))
    return dirty <= 1
