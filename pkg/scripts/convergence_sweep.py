#!/usr/bin/env python3
"""Sweep subgraph counts over synthetic inputs and tabulate convergence.

Reproduces the over-splitting effect: the dual-update-only baseline starts
failing as the number of stripes grows (immediately, for boundary-seeded
problems split across every source-to-sink path), while the merging solver
converges everywhere and always matches the serial cut value.

Usage: python scripts/convergence_sweep.py [--size 32] [--instances 10]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dyncut import (SolverConfig, build_seg1, build_seg2, gen_synthetic, run,
                    stripe_spec)
from dyncut.engine import solve_serial


def sweep(problem: str, size: int, instances: int, thread_counts) -> None:
    print(f"\n{problem}: {instances} instances of {size}x{size}")
    header = f"{'N':>3} | {'baseline failed':>15} | {'merging failed':>14} | " \
             f"{'value mismatches':>16}"
    print(header)
    print("-" * len(header))
    for n_sub in thread_counts:
        base_failed = merge_failed = mismatches = 0
        for seed in range(instances):
            kind = "seg1_worst" if problem == "seg1" else "seg2_random"
            img = gen_synthetic(kind, size, size, seed)
            g = build_seg1(img) if problem == "seg1" else build_seg2(img)
            serial = solve_serial(g)
            spec, meta = stripe_spec(size, size, n_sub)
            base = run(g, SolverConfig(n_subgraphs=n_sub,
                                       mode="baseline_pbk",
                                       max_iterations=1000), spec, meta)
            naive = run(g, SolverConfig(n_subgraphs=n_sub, iter_patience=20,
                                        mode="naive_converged",
                                        max_iterations=100000), spec, meta)
            base_failed += not base.converged
            merge_failed += not naive.converged
            mismatches += naive.cut_value != serial.cut_value
        print(f"{n_sub:>3} | {base_failed:>15} | {merge_failed:>14} | "
              f"{mismatches:>16}")


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=32)
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--threads", type=int, nargs="+", default=[2, 3, 4, 6, 8])
    args = ap.parse_args()
    sweep("seg1", args.size, args.instances, args.threads)
    sweep("seg2", args.size, args.instances, args.threads)
    return 0


if __name__ == "__main__":
    sys.exit(main())
