"""Experiment driver.

Sweep mode (default): run the Monte Carlo estimator over every (order, n_B)
pair and write one CSV row per point, byte-reproducibly for a fixed spec and
seed.  Debug mode (--placement): run a single scenario with a fixed
Byzantine placement, print the reliable-set map and write the simulation
trace.

Exit codes: 0 success, 1 configuration error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Sequence

from . import analysis as _analysis
from . import simulator as _simulator
from .evaluation import EXPLORER, ExperimentConfig, derive_seed, estimate_P
from .topology import build_grid, build_torus
from .zones import ctr_order

CSV_COLUMNS = "topology,N,W,n_B,trials,p_exists,mean_reliable_frac,p_hat,ci95,seed"


class ConfigError(Exception):
    """Bad flags, config file, or module preconditions; exits with code 1."""


@dataclass
class SweepSpec:
    kind: str
    N: int
    orders: list = field(default_factory=lambda: [1])
    n_bs: list = field(default_factory=lambda: [0])
    trials: int = 100
    seed: int = 0
    out: str = "sweep.csv"
    trace: bool = False
    crosscheck: float = 0.01
    pair_mode: str = "all"
    backtrack_budget: int = 10_000


def _check_spec(spec: SweepSpec) -> None:
    """Validate every point against its module preconditions before running."""
    n = spec.N * spec.N
    if spec.kind not in ("torus", "grid"):
        raise ConfigError(f"--topology must be torus or grid, got {spec.kind!r}")
    min_n = 3 if spec.kind == "torus" else 2
    if spec.N < min_n:
        raise ConfigError(f"--n: {spec.kind} side must be >= {min_n} (got {spec.N})")
    if not spec.orders:
        raise ConfigError("--order: need at least one order")
    for w in spec.orders:
        if w == EXPLORER:
            continue
        if not isinstance(w, int) or w < 1:
            raise ConfigError(f"--order: orders must be positive ints or 'explorer', got {w!r}")
        if w + 2 > spec.N:
            raise ConfigError(f"--order: order {w} violates W + 2 <= N for N={spec.N}")
    for n_b in spec.n_bs:
        if not (0 <= n_b < n):
            raise ConfigError(f"--byz: n_B={n_b} violates 0 <= n_B < n={n}")
    if spec.trials < 1:
        raise ConfigError("--trials: trial count must be >= 1")
    if not (0.0 <= spec.crosscheck <= 1.0):
        raise ConfigError("--crosscheck: fraction must be within [0, 1]")
    if spec.pair_mode not in ("all", "correct-only"):
        raise ConfigError(f"--pair-mode: must be all or correct-only, got {spec.pair_mode!r}")


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.6f}"


def run_sweep(spec: SweepSpec) -> str:
    """Run all points and write the CSV; returns the output path.

    The file appears only on success (written to a temp file, then renamed),
    so failures never leave partial output behind.
    """
    _check_spec(spec)
    rows = [CSV_COLUMNS]
    for w in spec.orders:
        for n_b in spec.n_bs:
            row_seed = derive_seed(spec.seed, spec.kind, spec.N, str(w), n_b)
            trace_dir = None
            if spec.trace and w != EXPLORER:
                trace_dir = f"{spec.out}.traces/w{w}_b{n_b}"
            cfg = ExperimentConfig(
                kind=spec.kind, N=spec.N, order=w, n_b=n_b, trials=spec.trials,
                seed=row_seed, crosscheck=0.0 if w == EXPLORER else spec.crosscheck,
                backtrack_budget=spec.backtrack_budget, pair_mode=spec.pair_mode,
                trace_dir=trace_dir)
            est = estimate_P(cfg)
            rows.append(",".join([
                spec.kind, str(spec.N), str(w), str(n_b), str(spec.trials),
                _fmt(est.p_exists), _fmt(est.mean_reliable_frac),
                _fmt(est.p_hat), _fmt(est.ci95), str(row_seed),
            ]))
    out_dir = os.path.dirname(os.path.abspath(spec.out))
    fd, tmp = tempfile.mkstemp(prefix=".sweep-", dir=out_dir)
    try:
        with os.fdopen(fd, "w") as fp:
            fp.write("\n".join(rows) + "\n")
        os.replace(tmp, spec.out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return spec.out


def read_placement(path: str, N: int) -> list[tuple[int, int]]:
    """Parse a placement file: one 'i,j' pair per line, '#' comments allowed."""
    out = []
    with open(path) as fp:
        for lineno, line in enumerate(fp, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split(",")
            if len(parts) != 2:
                raise ConfigError(f"{path}:{lineno}: expected 'i,j', got {line.strip()!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: non-integer coordinate in {line.strip()!r}")
            if not (1 <= i <= N and 1 <= j <= N):
                raise ConfigError(f"{path}:{lineno}: ({i},{j}) outside 1..{N}")
            out.append((i, j))
    return out


def scenario_map(topo, byz: frozenset[int], result: _analysis.AnalysisResult) -> str:
    """N x N character map: C = cover core (Byzantine members included),
    B = Byzantine outside any chosen core, R = reliable, x = other correct."""
    N = topo.N
    chars = []
    cores = result.cover.cores_union if result.cover else frozenset()
    for i in range(1, N + 1):
        row = []
        for j in range(1, N + 1):
            v = (i - 1) * N + (j - 1)
            if v in cores:
                row.append("C")
            elif v in byz:
                row.append("B")
            elif v in result.reliable:
                row.append("R")
            else:
                row.append("x")
        chars.append("".join(row))
    return "\n".join(chars)


def debug_scenario(kind: str, N: int, order: int, placement_path: str, seed: int,
                   trace_path: str | None = None, budget: int = 10_000,
                   out=sys.stdout) -> _analysis.AnalysisResult:
    """Analyze one fixed placement, print its map, and simulate it.

    The communicating set is seeded at the lowest-index correct node.  The
    simulation runs the default forging adversary; its trace goes to
    ``trace_path`` when given.
    """
    topo = build_torus(N) if kind == "torus" else build_grid(N)
    coords = read_placement(placement_path, N)
    byz = frozenset(topo.index(i, j) for (i, j) in coords)
    if len(byz) >= topo.n:
        raise ConfigError("placement marks every node Byzantine")
    zs = ctr_order(topo, order)
    seed_node = min(p for p in range(topo.n) if p not in byz)
    result = _analysis.analyze(topo, zs, byz, seed_node, budget=budget)
    if result.cover is None and byz:
        out.write("no safe cover\n")
    out.write(scenario_map(topo, byz, result) + "\n")
    out.write(f"byzantine={len(byz)} reliable={len(result.reliable)} "
              f"of {topo.n - len(byz)} correct nodes\n")
    rng = random.Random(derive_seed(seed, "script"))
    scripts = _simulator.default_forging_scripts(topo, zs, byz, rng)
    trace = _simulator.run(topo, zs, byz, scripts, seed=seed,
                           record_deliveries=trace_path is not None)
    out.write(f"simulated: {trace.std_sent} standard, {trace.auth_sent} "
              f"authorization messages, {len(trace.accept_log)} acceptances\n")
    if trace_path is not None:
        with open(trace_path, "w") as fp:
            _simulator.export_trace(trace, topo, zs, fp)
        out.write(f"trace written to {trace_path}\n")
    return result


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 on bad flags, not argparse's 2
        raise ConfigError(message)


def _parse_orders(text: str) -> list:
    out = []
    for part in text.split(","):
        part = part.strip()
        if part == EXPLORER:
            out.append(EXPLORER)
        else:
            try:
                out.append(int(part))
            except ValueError:
                raise ConfigError(f"--order: {part!r} is neither an int nor 'explorer'")
    return out


def _parse_byz(text: str) -> list[int]:
    """Comma list and/or 'a..b' / 'a..b:step' ranges."""
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            if ".." in part:
                bounds, _, step_s = part.partition(":")
                lo_s, _, hi_s = bounds.partition("..")
                lo, hi = int(lo_s), int(hi_s)
                step = int(step_s) if step_s else 1
                if step < 1 or hi < lo:
                    raise ValueError
                out.extend(range(lo, hi + 1, step))
            else:
                out.append(int(part))
        except ValueError:
            raise ConfigError(f"--byz: cannot parse {part!r} (use e.g. '0,5,10' or '0..20:5')")
    return out


def _load_config(path: str) -> dict[str, str]:
    cfg = {}
    try:
        with open(path) as fp:
            for lineno, line in enumerate(fp, start=1):
                text = line.split("#", 1)[0].strip()
                if not text:
                    continue
                if "=" not in text:
                    raise ConfigError(f"{path}:{lineno}: expected KEY=VALUE")
                key, _, value = text.partition("=")
                cfg[key.strip().replace("-", "_")] = value.strip()
        return cfg
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zonecast", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--topology", choices=["torus", "grid"])
    p.add_argument("--n", type=int, metavar="N", help="side length")
    p.add_argument("--order", metavar="W|explorer", help="comma list, e.g. 1,2,3 or explorer")
    p.add_argument("--byz", metavar="LIST|RANGE", help="n_B values, e.g. 0,5,10 or 0..20:5")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--trace", action="store_true", default=None,
                   help="debug mode: write the simulation trace (JSON lines)")
    p.add_argument("--crosscheck", type=float, metavar="FRAC",
                   help="fraction of trials cross-checked in the simulator")
    p.add_argument("--pair-mode", choices=["all", "correct-only"])
    p.add_argument("--placement", metavar="FILE",
                   help="debug a single scenario with this Byzantine placement")
    p.add_argument("--backtrack-budget", type=int)
    p.add_argument("--config", metavar="FILE", help="KEY=VALUE defaults; flags win")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        file_cfg = _load_config(args.config) if args.config else {}

        def pick(name: str, fallback, convert=lambda x: x):
            flag = getattr(args, name)
            if flag is not None:
                return flag
            if name in file_cfg:
                return convert(file_cfg[name])
            return fallback

        kind = pick("topology", None)
        if kind is None:
            raise ConfigError("--topology is required (torus or grid)")
        N = pick("n", None, int)
        if N is None:
            raise ConfigError("--n is required")
        seed = pick("seed", 0, int)

        if args.placement or "placement" in file_cfg:
            orders = _parse_orders(str(pick("order", "1")))
            if len(orders) != 1 or orders[0] == EXPLORER:
                raise ConfigError("debug mode needs a single integer --order")
            trace_path = None
            if pick("trace", False, lambda v: v.lower() in ("1", "true", "yes")):
                trace_path = pick("out", "debug_trace.jsonl")
            debug_scenario(kind, N, orders[0], pick("placement", None), seed,
                           trace_path=trace_path,
                           budget=pick("backtrack_budget", 10_000, int))
            return 0

        spec = SweepSpec(
            kind=kind, N=N,
            orders=_parse_orders(str(pick("order", "1"))),
            n_bs=_parse_byz(str(pick("byz", "0"))),
            trials=pick("trials", 100, int),
            seed=seed,
            out=pick("out", "sweep.csv"),
            trace=bool(pick("trace", False, lambda v: v.lower() in ("1", "true", "yes"))),
            crosscheck=pick("crosscheck", 0.01, float),
            pair_mode=pick("pair_mode", "all"),
            backtrack_budget=pick("backtrack_budget", 10_000, int),
        )
        path = run_sweep(spec)
        print(f"wrote {path}")
        return 0
    except ConfigError as e:
        print(f"zonecast: config error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"zonecast: config error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"zonecast: i/o error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
