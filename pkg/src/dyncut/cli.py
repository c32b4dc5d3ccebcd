"""Command-line bench harness.

Examples:

    dyncut-bench --input synthetic:seg1_worst:32x32 --problem seg1 \
        --mode baseline_pbk --mode naive_converged --threads 4 --iter 20

    dyncut-bench --input instance.dimacs --problem raw \
        --mode naive_converged --threads 2 --out report.csv

    dyncut-bench --config bench.cfg

A config file holds ``key = value`` lines (same keys as the flags, long
names); flags given on the command line override it.  Exit codes: 0 success,
2 bad input, 3 cut-value mismatch between converged modes.
"""

from __future__ import annotations

import argparse
import sys

from .bench import BenchConfig, CutMismatchError, run_bench

_CONFIG_KEYS = {
    "input": str, "problem": str, "threads": int, "iter": int,
    "merge_size": int, "merge_period": int, "max_iter": int, "seed": int,
    "repetitions": int, "orientation": str, "transport": str, "out": str,
    "hist": str, "mode": str,
}


def load_config_file(path: str) -> dict:
    values: dict = {}
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{line_no}: unknown key {key!r}")
            if key == "mode":
                values.setdefault("mode", []).extend(value.split())
            else:
                values[key] = _CONFIG_KEYS[key](value)
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dyncut-bench",
        description="Run the serial and parallel cut solvers on one input "
                    "and report timings, convergence and flow reuse.")
    p.add_argument("--config", help="key = value file with these same options")
    p.add_argument("--input", help="image (.pgm), DIMACS file, or "
                                   "synthetic:<kind>:<WxH>")
    p.add_argument("--problem", choices=["seg1", "seg2", "raw"])
    p.add_argument("--mode", action="append",
                   choices=["serial", "baseline_pbk", "naive_converged",
                            "dynamic", "flow_reuse"],
                   help="repeatable; serial always runs as the reference")
    p.add_argument("--threads", type=int, help="number of subgraphs N")
    p.add_argument("--iter", type=int, help="merge patience ITER")
    p.add_argument("--merge-size", type=int, help="neighbors merged per group")
    p.add_argument("--merge-period", type=int,
                   help="dynamic mode: merge every K iterations")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--repetitions", type=int, help="best-of-R timing")
    p.add_argument("--orientation", choices=["vertical", "horizontal"])
    p.add_argument("--transport",
                   help="in_process or simnet:<machines>[:<latency>[:<Bps>]]")
    p.add_argument("--out", help="CSV output path (stdout otherwise)")
    p.add_argument("--hist", help="gnuplot-ready histogram data path")
    return p


def make_bench_config(args: argparse.Namespace) -> BenchConfig:
    values: dict = {}
    if args.config:
        values.update(load_config_file(args.config))
    for key in _CONFIG_KEYS:
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            values[key] = flag
    if "input" not in values:
        raise ValueError("an --input is required (flag or config file)")
    modes = tuple(values.get("mode") or ("naive_converged",))
    return BenchConfig(
        input=values["input"],
        problem=values.get("problem", "seg2"),
        modes=modes,
        n_subgraphs=values.get("threads", 2),
        iter_patience=values.get("iter", 20),
        merge_group_size=values.get("merge_size", 2),
        merge_period=values.get("merge_period", 0),
        max_iterations=values.get("max_iter", 1000),
        seed=values.get("seed", 0),
        repetitions=values.get("repetitions", 3),
        orientation=values.get("orientation", "vertical"),
        transport=values.get("transport", "in_process"),
        out=values.get("out"),
        hist=values.get("hist"),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_bench_config(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run_bench(cfg)
    except CutMismatchError as exc:
        print(f"CUT VALUE MISMATCH: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not cfg.out:
        sys.stdout.write(report.to_csv())
    return 0


if __name__ == "__main__":
    sys.exit(main())
