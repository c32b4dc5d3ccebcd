"""Benchmark harness: ingest inputs, run solver modes, emit CSV reports.

Timing is best-of-R wall clock around the solver only (graph construction
and I/O excluded).  Every converged mode must report the same cut value as
the serial solver; a mismatch is a correctness failure, not a statistic.

The ``flow_reuse`` probe mirrors the merge experiment: split in two, iterate
a fixed number of rounds (or until agreement), merge everything back, and
time the residual solve of the merged graph against a cold solve of the
original.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field, replace

from .bk import BkState
from .capacity import Cap
from .dimacs import read_dimacs
from .engine import CutResult, Engine, SolverConfig, solve_serial
from .graph import FlowGraph
from .images import GridImage, build_seg1, build_seg2, gen_synthetic, read_pgm
from .pseudo_boolean import cut_cost
from .split_merge import StripeMeta, merge, split_grid, stripe_spec

CSV_COLUMNS = [
    "input", "problem", "mode", "n_subgraphs", "iter_patience",
    "merge_group_size", "merge_period", "seed", "converged", "iterations",
    "cut_value", "t_serial", "t_mode", "relative_time",
    "relative_reused_flow", "modeled_time", "modeled_bytes", "n_merges",
    "first_ndiff",
]


class CutMismatchError(RuntimeError):
    """Two converged runs disagreed on the optimal cut value."""


@dataclass
class BenchConfig:
    input: str                       # path, or "synthetic:<kind>:<WxH>"
    problem: str = "seg2"            # seg1 | seg2 | raw
    modes: tuple[str, ...] = ("serial", "naive_converged")
    n_subgraphs: int = 2
    iter_patience: int = 20
    merge_group_size: int = 2
    merge_period: int = 0
    max_iterations: int = 1000
    seed: int = 0
    repetitions: int = 3
    orientation: str = "vertical"
    transport: str = "in_process"    # or "simnet:<machines>:<latency>:<bytes/s>"
    out: str | None = None
    hist: str | None = None

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.problem not in ("seg1", "seg2", "raw"):
            raise ValueError(f"unknown problem {self.problem!r}")


@dataclass
class BenchRow:
    mode: str
    converged: bool
    iterations: int
    cut_value: Cap
    t_serial: float
    t_mode: float
    relative_reused_flow: float | None
    modeled_time: float
    modeled_bytes: int
    n_merges: int
    first_ndiff: int

    @property
    def relative_time(self) -> float:
        return self.t_mode / self.t_serial if self.t_serial > 0 else 0.0


@dataclass
class BenchReport:
    config: BenchConfig
    rows: list[BenchRow] = field(default_factory=list)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        c = self.config
        for row in self.rows:
            writer.writerow({
                "input": c.input, "problem": c.problem, "mode": row.mode,
                "n_subgraphs": c.n_subgraphs,
                "iter_patience": c.iter_patience,
                "merge_group_size": c.merge_group_size,
                "merge_period": c.merge_period, "seed": c.seed,
                "converged": int(row.converged),
                "iterations": row.iterations,
                "cut_value": str(row.cut_value),
                "t_serial": f"{row.t_serial:.6f}",
                "t_mode": f"{row.t_mode:.6f}",
                "relative_time": f"{row.relative_time:.4f}",
                "relative_reused_flow": (
                    "" if row.relative_reused_flow is None
                    else f"{row.relative_reused_flow:.4f}"),
                "modeled_time": f"{row.modeled_time:.6f}",
                "modeled_bytes": row.modeled_bytes,
                "n_merges": row.n_merges,
                "first_ndiff": row.first_ndiff,
            })
        return out.getvalue()

    def histogram_data(self) -> str:
        """gnuplot-ready columns: mode metric value"""
        lines = []
        for row in self.rows:
            lines.append(f"{row.mode} relative_time {row.relative_time:.4f}")
            if row.relative_reused_flow is not None:
                lines.append(f"{row.mode} relative_reused_flow "
                             f"{row.relative_reused_flow:.4f}")
        return "\n".join(lines) + "\n"


# -- input loading ------------------------------------------------------------------


def load_input(cfg: BenchConfig) -> tuple[FlowGraph, GridImage | None]:
    """Build the problem graph; returns the image too when there is one."""
    img: GridImage | None = None
    if cfg.input.startswith("synthetic:"):
        fields = cfg.input.split(":")
        if len(fields) != 3 or "x" not in fields[2]:
            raise ValueError(
                "synthetic input must look like synthetic:<kind>:<WxH>")
        kind = fields[1]
        w, h = (int(p) for p in fields[2].split("x"))
        img = gen_synthetic(kind, w, h, cfg.seed)
    elif cfg.input.endswith(".pgm"):
        img = read_pgm(cfg.input)

    if cfg.problem == "raw":
        if img is not None:
            raise ValueError("problem=raw expects a DIMACS file")
        with open(cfg.input) as fh:
            return read_dimacs(fh), None
    if img is None:
        raise ValueError(f"problem={cfg.problem} needs an image input")
    builder = build_seg1 if cfg.problem == "seg1" else build_seg2
    return builder(img), img


def make_transport(spec: str):
    from .transport import InProcessTransport, SimulatedNetworkTransport
    if spec == "in_process":
        return InProcessTransport()
    if spec.startswith("simnet"):
        fields = spec.split(":")
        machines = int(fields[1]) if len(fields) > 1 else 2
        latency = float(fields[2]) if len(fields) > 2 else 1e-4
        rate = float(fields[3]) if len(fields) > 3 else 1e9
        return SimulatedNetworkTransport(machines, latency, rate)
    raise ValueError(f"unknown transport {spec!r}")


def _solver_config(cfg: BenchConfig, mode: str) -> SolverConfig:
    return SolverConfig(
        n_subgraphs=cfg.n_subgraphs,
        iter_patience=cfg.iter_patience,
        merge_group_size=cfg.merge_group_size,
        merge_period=cfg.merge_period,
        max_iterations=cfg.max_iterations,
        mode=mode,
        transport=make_transport(cfg.transport),
    )


def _region(cfg: BenchConfig, img: GridImage | None, g: FlowGraph):
    if img is not None and cfg.n_subgraphs > 1:
        return stripe_spec(img.width, img.height, cfg.n_subgraphs,
                           cfg.orientation)
    return None, None


def _timed(fn, repetitions: int):
    best = None
    result = None
    for _ in range(repetitions):
        t0 = time.perf_counter()
        result = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return result, best


# -- main entry ------------------------------------------------------------------------


def run_bench(cfg: BenchConfig) -> BenchReport:
    g, img = load_input(cfg)
    report = BenchReport(cfg)

    serial_result, t_serial = _timed(lambda: solve_serial(g), cfg.repetitions)
    report.rows.append(BenchRow(
        "serial", True, serial_result.iterations, serial_result.cut_value,
        t_serial, t_serial, serial_result.relative_reused_flow, 0.0, 0,
        0, serial_result.first_ndiff))

    spec, meta = _region(cfg, img, g)
    for mode in cfg.modes:
        if mode == "serial":
            continue
        if mode == "flow_reuse":
            report.rows.append(_flow_reuse_row(cfg, g, img, t_serial))
            continue

        def once():
            config = _solver_config(cfg, mode)
            return Engine(g, config, spec, meta).run()

        result, t_mode = _timed(once, cfg.repetitions)
        n_merges = sum(len(s.merges_performed) for s in result.stats)
        report.rows.append(BenchRow(
            mode, result.converged, result.iterations, result.cut_value,
            t_serial, t_mode, result.relative_reused_flow,
            result.modeled_time, result.modeled_bytes, n_merges,
            result.first_ndiff))
        if result.converged and result.cut_value != serial_result.cut_value:
            raise CutMismatchError(
                f"mode {mode} converged to {result.cut_value}, serial got "
                f"{serial_result.cut_value}")

    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(report.to_csv())
    if cfg.hist:
        with open(cfg.hist, "w") as fh:
            fh.write(report.histogram_data())
    return report


# -- flow-reuse probe ----------------------------------------------------------------


@dataclass
class FlowReuseResult:
    reused_flow: Cap
    maxflow: Cap
    relative_reused_flow: float
    t_cold: float
    t_merged_residual: float
    iterations_run: int


def flow_reuse_probe(g: FlowGraph, img: GridImage | None, n_subgraphs: int,
                     iterations: int, orientation: str = "vertical",
                     repetitions: int = 3) -> FlowReuseResult:
    """Split, iterate, merge everything, and time the residual solve."""
    def cold():
        state = BkState(g.copy())
        return state.solve()

    (cold_flow, _), t_cold = _timed(cold, repetitions)

    spec = meta = None
    if img is not None and n_subgraphs > 1:
        spec, meta = stripe_spec(img.width, img.height, n_subgraphs,
                                 orientation)
    config = SolverConfig(n_subgraphs=n_subgraphs, mode="baseline_pbk",
                          max_iterations=iterations)
    engine = Engine(g, config, spec, meta)

    merged_holder: dict[str, FlowGraph] = {}

    def capture(event, parts):
        merged_holder["parts"] = parts

    engine.audit_hook = capture
    result = engine.run()
    parts = merged_holder["parts"]
    while parts.n_subgraphs > 1:
        parts, _ = merge(parts, tuple(range(parts.n_subgraphs)))
    merged = parts.subgraphs[0]
    reused = merged.accumulated_flow

    def residual():
        state = BkState(merged.copy())
        return state.solve()

    _, t_merged = _timed(residual, repetitions)
    ratio = float(reused.as_fraction() / cold_flow.as_fraction()) \
        if cold_flow else 1.0
    return FlowReuseResult(reused, cold_flow, ratio, t_cold, t_merged,
                           result.iterations)


def _flow_reuse_row(cfg: BenchConfig, g: FlowGraph, img: GridImage | None,
                    t_serial: float) -> BenchRow:
    probe = flow_reuse_probe(g, img, cfg.n_subgraphs, cfg.iter_patience,
                             cfg.orientation, cfg.repetitions)
    return BenchRow(
        "flow_reuse", True, probe.iterations_run,
        probe.maxflow, probe.t_cold, probe.t_merged_residual,
        probe.relative_reused_flow, 0.0, 0, 1, 0)
