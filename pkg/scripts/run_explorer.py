#!/usr/bin/env python3
"""Modified-Explorer baseline on 100x100 torus and grid networks.

Four fixed node-disjoint paths per random pair; a trial succeeds when
Byzantine nodes touch at most one path.  Sweeps n_B = 1..12 to expose where
the 0.99 success threshold falls on each topology.
"""

import argparse

from zonecast.cli import SweepSpec, run_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    for kind in ("torus", "grid"):
        spec = SweepSpec(
            kind=kind, N=100,
            orders=["explorer"],
            n_bs=list(range(1, 13)),
            trials=args.trials,
            seed=args.seed,
            out=f"explorer_{kind}100.csv",
        )
        print(f"wrote {run_sweep(spec)}")


if __name__ == "__main__":
    main()
