#!/usr/bin/env python3
"""Scaled sweep on a 30x30 torus: orders 1..3, a small n_B grid.

Finishes in a few minutes and shows the qualitative trends (existence
probability rises with the order, reliable fraction falls with it, pair
success falls with n_B).  Output: one CSV row per (W, n_B) point.
"""

import argparse

from zonecast.cli import SweepSpec, run_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="scaled_torus30.csv")
    ap.add_argument("--trials", type=int, default=400)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    spec = SweepSpec(
        kind="torus", N=30,
        orders=[1, 2, 3],
        n_bs=[0, 5, 10, 20],
        trials=args.trials,
        seed=args.seed,
        out=args.out,
        crosscheck=0.0,
    )
    print(f"wrote {run_sweep(spec)}")


if __name__ == "__main__":
    main()
