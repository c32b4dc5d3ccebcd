#!/usr/bin/env python3
"""Measure how much subgraph flow survives a merge and what it saves.

For each seeded instance: split in two, iterate, merge everything back, then
time the merged graph's residual solve against a cold solve of the original.
Prints per-instance rows plus a small histogram of the speedup factors.

Usage: python scripts/flow_reuse_report.py [--size 64] [--instances 20]
                                           [--iters 20] [--sigma 100]
"""

import argparse
import statistics
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dyncut import build_seg2, gen_synthetic
from dyncut.bench import flow_reuse_probe


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=64)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--iters", type=int, default=20)
    ap.add_argument("--sigma", type=float, default=100.0)
    ap.add_argument("--repetitions", type=int, default=3)
    args = ap.parse_args()

    print(f"{'seed':>4} | {'reused':>7} | {'cold ms':>8} | {'resid ms':>8} | "
          f"{'speedup':>7}")
    print("-" * 46)
    ratios, speedups = [], []
    for seed in range(args.instances):
        img = gen_synthetic("seg2_random", args.size, args.size, seed)
        g = build_seg2(img, sigma=args.sigma)
        probe = flow_reuse_probe(g, img, 2, args.iters,
                                 repetitions=args.repetitions)
        speedup = probe.t_cold / probe.t_merged_residual \
            if probe.t_merged_residual > 0 else float("inf")
        ratios.append(probe.relative_reused_flow)
        speedups.append(speedup)
        print(f"{seed:>4} | {probe.relative_reused_flow:>7.4f} | "
              f"{probe.t_cold * 1000:>8.2f} | "
              f"{probe.t_merged_residual * 1000:>8.2f} | {speedup:>7.2f}")

    print(f"\nmedian reused-flow ratio: {statistics.median(ratios):.4f}")
    print(f"median speedup:           {statistics.median(speedups):.2f}x")
    print("\nspeedup histogram (each * = one instance)")
    for lo, hi in [(0, 1), (1, 2), (2, 4), (4, 8), (8, 16), (16, 1e9)]:
        count = sum(1 for s in speedups if lo <= s < hi)
        label = f"{lo:>3}-{hi if hi < 1e9 else '':<3}"
        print(f"  {label}: {'*' * count}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
