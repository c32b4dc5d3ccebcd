"""Bulk-synchronous dual-decomposition engine over overlapping subgraphs.

Each iteration solves every subgraph (warm-started), counts overlap
disagreements, and either updates the dual variables or merges subgraphs.
Three modes share one loop:

* ``baseline_pbk``    -- dual updates only; may hit the iteration cap.
* ``naive_converged`` -- merges every two neighbors whenever the running
  minimum of the disagreement count fails to improve for ``iter_patience``
  consecutive iterations, plus a just-in-time merge-all fallback that keeps
  the run inside its iteration budget, so termination at full agreement is
  guaranteed.
* ``dynamic``         -- user hooks decide when to split further, when to
  merge, and which groups; the defaults reproduce ``naive_converged``
  exactly.

Dual updates move each disagreeing overlap vertex's two linear coefficients
toward the other side's label.  They are realized as *capacity transfers*
between the two copies of the vertex's terminal links (source<->source,
sink<->sink), capped by what the donor link holds, so the sum of all
subgraph functions (plus absorbed flows) stays exactly equal to the original
function at every iteration.  A vertex with no transferable capacity simply
waits for a merge -- which is what merging is for.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import ceil, log2

from .bk import BkState
from .capacity import Cap, cap_min, cap_sum
from .dimacs import serialized_size
from .graph import Assignment, FlowGraph
from .pseudo_boolean import cut_cost
from .split_merge import Overlap, Partition, RegionSpec, StripeMeta, \
    block_spec, merge, split
from .transport import InProcessTransport, SimulatedNetworkTransport

MODES = ("baseline_pbk", "naive_converged", "dynamic")


@dataclass
class SolverConfig:
    n_subgraphs: int = 2
    iter_patience: int = 20         # non-improving iterations tolerated before merging
    merge_group_size: int = 2       # neighbors merged per group
    merge_period: int = 0           # dynamic only: 0 = patience rule, K = merge every K
    max_iterations: int = 1000
    step_init: Cap = Cap(1)
    step_min_halvings: int = 6      # step floor = step_init / 2**this
    mode: str = "naive_converged"
    n_workers: int = 1
    transport: InProcessTransport | SimulatedNetworkTransport = field(
        default_factory=InProcessTransport)

    def __post_init__(self):
        if self.n_subgraphs < 1:
            raise ValueError("n_subgraphs must be >= 1")
        if self.iter_patience < 1:
            raise ValueError("iter_patience must be >= 1")
        if self.merge_group_size < 2:
            raise ValueError("merge_group_size must be >= 2")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not self.step_init > Cap(0):
            raise ValueError("step_init must be positive")


@dataclass
class MergeEvent:
    group: tuple[int, ...]
    reused_flow: Cap                # sum of live accumulated flows just before merging
    subgraphs_after: int


@dataclass
class IterationStats:
    iteration: int
    flows: tuple[Cap, ...]          # accumulated-flow delta per live subgraph
    ndiff: int
    dual_bound: Cap                 # sum of subgraph minima = total absorbed flow
    merges_performed: tuple[MergeEvent, ...] = ()

    def as_row(self) -> dict:
        return {
            "iteration": self.iteration,
            "ndiff": self.ndiff,
            "dual_bound": str(self.dual_bound),
            "flows": ";".join(str(f) for f in self.flows),
            "merges": ";".join(",".join(map(str, ev.group))
                               for ev in self.merges_performed),
        }


@dataclass
class CutResult:
    assignment: Assignment
    cut_value: Cap
    converged: bool
    iterations: int
    stats: list[IterationStats]
    relative_reused_flow: float | None  # flow absorbed before first merge / maxflow
    first_ndiff: int
    iteration_bound: int | None         # patience-rule budget, when applicable
    modeled_time: float = 0.0
    modeled_bytes: int = 0


@dataclass
class VertexDual:
    lam: Cap = Cap(0)
    step: Cap = Cap(1)
    last_sign: int = 0


@dataclass
class DualState:
    """Per-overlap dual variables keyed by shared global vertex id."""

    step_init: Cap
    step_min: Cap
    by_pair: dict[tuple[int, int], dict[int, VertexDual]] = field(
        default_factory=dict)

    def vertex(self, pair: tuple[int, int], v: int) -> VertexDual:
        table = self.by_pair.setdefault(pair, {})
        if v not in table:
            table[v] = VertexDual(step=self.step_init)
        return table[v]

    def remap_pairs(self, pair_map) -> None:
        """Re-key overlaps after a topology change; dropped pairs lose state."""
        remapped: dict[tuple[int, int], dict[int, VertexDual]] = {}
        for pair, table in self.by_pair.items():
            new = pair_map(pair)
            if new is not None:
                remapped[new] = table
        self.by_pair = remapped


# -- strategy hooks ------------------------------------------------------------


@dataclass
class HookContext:
    """Read-only view handed to the strategy hooks each iteration."""

    iteration: int
    ndiff: int
    best_ndiff: int
    stalled_iters: int
    n_subgraphs: int
    stats: list[IterationStats]
    partition: Partition


@dataclass
class StrategyHooks:
    """Policy plug-in points for the dynamic mode.

    ``inner_stop(ctx)`` ends the inner solve/update loop; ``should_merge(ctx)``
    then names the groups to merge (None = pair up neighbors);
    ``should_split(ctx)`` may return ``[(subgraph_index, RegionSpec), ...]``
    refinements, applied at startup and after every merge round.
    """

    inner_stop: object = None
    should_merge: object = None
    should_split: object = None


def pairwise_groups(n: int, group_size: int = 2) -> list[tuple[int, ...]]:
    """(0,1), (2,3), ...; a leftover that cannot fill a pair stays unmerged."""
    groups = []
    k = 0
    while k + group_size <= n:
        groups.append(tuple(range(k, k + group_size)))
        k += group_size
    return groups


def schedule_hooks(merge_period: int, group_size: int) -> StrategyHooks:
    """Merge every ``merge_period`` iterations, ``group_size`` neighbors a group."""

    def inner_stop(ctx: HookContext) -> bool:
        return ctx.iteration % merge_period == 0

    def should_merge(ctx: HookContext):
        return pairwise_groups(ctx.n_subgraphs, group_size)

    return StrategyHooks(inner_stop=inner_stop, should_merge=should_merge)


def iteration_budget(first_ndiff: int, iter_patience: int,
                     n_subgraphs: int) -> int:
    """Termination budget M*(patience-1) + ceil(log2 N) (floored at 2)."""
    log_term = ceil(log2(n_subgraphs)) if n_subgraphs > 1 else 0
    return max(first_ndiff * (iter_patience - 1) + log_term, 2)


# -- stopping rule and dual update ------------------------------------------------


def disagreement(parts: Partition, labels: list[Assignment]):
    """Count overlap vertices labeled differently by their two subgraphs.

    Returns (ndiff, diffs) where diffs lists ((a, b), vertex, x_a, x_b).
    The stopping rule of the whole engine is ndiff == 0.
    """
    ndiff = 0
    diffs = []
    for ov in parts.overlaps:
        for v in ov.vertices:
            xa = labels[ov.a][parts.g2l[ov.a][v]]
            xb = labels[ov.b][parts.g2l[ov.b][v]]
            if xa != xb:
                ndiff += 1
                diffs.append(((ov.a, ov.b), v, xa, xb))
    return ndiff, diffs


def dual_update(parts: Partition, dual: DualState, diffs):
    """Build per-subgraph terminal-link delta batches for the disagreements.

    Each disagreeing vertex's two linear coefficients move toward the other
    side's label by the adaptive step, realized exactly as capacity
    transfers between the vertex's two terminal-link copies.  The step
    doubles while the disagreement keeps its direction and halves when it
    flips, never below the configured floor.  Agreeing vertices are left
    untouched, and all other coefficients are untouched by construction.
    """
    batches: dict[int, list] = {}
    for (pair, v, xa, xb) in diffs:
        a, b = pair
        vd = dual.vertex(pair, v)
        direction = xa - xb          # +1: side a says sink-side, b says source-side
        if vd.last_sign == direction:
            vd.step = vd.step.double()
        elif vd.last_sign == -direction:
            halved = vd.step.halve()
            vd.step = halved if halved >= dual.step_min else dual.step_min
        vd.last_sign = direction
        want = vd.step

        ga, gb = parts.subgraphs[a], parts.subgraphs[b]
        la, lb = parts.g2l[a][v], parts.g2l[b][v]
        if direction > 0:
            # raise side a's linear coefficient, lower side b's:
            # move source capacity b->a and/or sink capacity a->b
            u = cap_min(want, gb.source_cap(lb))
            w = cap_min(want - u, ga.sink_cap(la))
            if u or w:
                batches.setdefault(a, []).append((la, u, -w))
                batches.setdefault(b, []).append((lb, -u, w))
                vd.lam = vd.lam + u + w
        else:
            u = cap_min(want, ga.source_cap(la))
            w = cap_min(want - u, gb.sink_cap(lb))
            if u or w:
                batches.setdefault(a, []).append((la, -u, w))
                batches.setdefault(b, []).append((lb, u, -w))
                vd.lam = vd.lam - u - w
    return batches


# -- engine -------------------------------------------------------------------------


class Engine:
    def __init__(self, g: FlowGraph, config: SolverConfig,
                 region_spec: RegionSpec | None = None,
                 stripe_meta: StripeMeta | None = None,
                 hooks: StrategyHooks | None = None,
                 audit_hook=None):
        self.original = g
        self.config = config
        self.hooks = hooks or StrategyHooks()
        self.audit_hook = audit_hook
        self.region_spec = region_spec
        self.stripe_meta = stripe_meta
        self.transport = config.transport
        self.stats: list[IterationStats] = []
        self.dual = DualState(
            step_init=config.step_init,
            step_min=_halved(config.step_init, config.step_min_halvings))

    def run(self) -> CutResult:
        cfg = self.config
        if cfg.n_subgraphs == 1 or self.original.n_vertices == 0:
            return self._run_serial()

        spec = self.region_spec or block_spec(self.original.n_vertices,
                                              cfg.n_subgraphs)
        parts = split(self.original, spec, stripe_meta=self.stripe_meta)
        self.transport.assign_machines(parts.n_subgraphs)
        states = [BkState(sub) for sub in parts.subgraphs]
        self._audit("split", parts)
        parts, states = self._apply_split_hooks(parts, states)

        patience_rule = (cfg.mode == "naive_converged"
                         or (cfg.mode == "dynamic"
                             and self.hooks.inner_stop is None
                             and not cfg.merge_period))
        flows_seen = [sub.accumulated_flow for sub in parts.subgraphs]
        best_ndiff: int | None = None
        stalled = 0
        first_ndiff = 0
        budget: int | None = None
        reused_at_first_merge: Cap | None = None
        labels: list[Assignment] = []
        converged = False
        k = 0

        while k < cfg.max_iterations:
            k += 1
            labels = self._solve_all(states)
            self._audit("solve", parts)
            flows = tuple(sub.accumulated_flow - seen
                          for sub, seen in zip(parts.subgraphs, flows_seen))
            flows_seen = [sub.accumulated_flow for sub in parts.subgraphs]
            ndiff, diffs = disagreement(parts, labels)
            for ov in parts.overlaps:
                self.transport.on_labels((ov.a, ov.b), len(ov.vertices))
            dual_bound = cap_sum(sub.accumulated_flow
                                 for sub in parts.subgraphs)
            record = IterationStats(k, flows, ndiff, dual_bound)
            self.stats.append(record)

            if k == 1:
                first_ndiff = ndiff
                if patience_rule:
                    budget = iteration_budget(first_ndiff, cfg.iter_patience,
                                              cfg.n_subgraphs)
            if ndiff == 0:
                converged = True
                break

            if best_ndiff is None or ndiff < best_ndiff:
                best_ndiff = ndiff
                stalled = 0
            else:
                stalled += 1

            if cfg.mode == "baseline_pbk":
                self._dual_update(parts, states, diffs)
                continue

            ctx = HookContext(k, ndiff, best_ndiff, stalled,
                              parts.n_subgraphs, self.stats, parts)
            groups = self._merge_decision(ctx, k, budget, patience_rule)
            if groups and parts.n_subgraphs > 1:
                if reused_at_first_merge is None:
                    reused_at_first_merge = dual_bound
                parts, states = self._do_merges(parts, states, groups, record)
                stalled = 0
                self._audit("merge", parts)
                parts, states = self._apply_split_hooks(parts, states)
                flows_seen = [sub.accumulated_flow for sub in parts.subgraphs]
            else:
                self._dual_update(parts, states, diffs)

        assignment = self._global_assignment(parts, labels)
        cut_value = cut_cost(self.original, assignment)
        total_flow = cap_sum(sub.accumulated_flow for sub in parts.subgraphs)
        reused = (reused_at_first_merge if reused_at_first_merge is not None
                  else total_flow)
        return CutResult(
            assignment=assignment,
            cut_value=cut_value,
            converged=converged,
            iterations=k,
            stats=self.stats,
            relative_reused_flow=_ratio(reused, cut_value) if converged else None,
            first_ndiff=first_ndiff,
            iteration_bound=budget,
            modeled_time=self.transport.modeled_time,
            modeled_bytes=self.transport.modeled_bytes,
        )

    def _run_serial(self) -> CutResult:
        g = self.original.copy()
        state = BkState(g)
        flow, assignment = state.solve()
        self.stats.append(IterationStats(1, (flow,), 0, g.accumulated_flow))
        cut_value = cut_cost(self.original, assignment)
        return CutResult(assignment, cut_value, True, 1, self.stats,
                         _ratio(g.accumulated_flow, cut_value), 0, None)

    # pieces --------------------------------------------------------------------

    def _solve_all(self, states: list[BkState]) -> list[Assignment]:
        if self.config.n_workers > 1 and len(states) > 1:
            with ThreadPoolExecutor(self.config.n_workers) as pool:
                results = list(pool.map(lambda s: s.solve(), states))
        else:
            results = [s.solve() for s in states]
        return [assignment for _flow, assignment in results]

    def _merge_decision(self, ctx: HookContext, k: int, budget: int | None,
                        patience_rule: bool):
        cfg = self.config
        if cfg.mode == "dynamic" and self.hooks.inner_stop is not None:
            if not self.hooks.inner_stop(ctx):
                return None
            if self.hooks.should_merge is not None:
                return self.hooks.should_merge(ctx)
            return pairwise_groups(ctx.n_subgraphs, cfg.merge_group_size)
        if cfg.mode == "dynamic" and cfg.merge_period:
            if ctx.iteration % cfg.merge_period:
                return None
            return pairwise_groups(ctx.n_subgraphs, cfg.merge_group_size)
        if patience_rule:
            if k >= min(budget, cfg.max_iterations) - 1:
                return [tuple(range(ctx.n_subgraphs))]  # just-in-time merge-all
            if ctx.stalled_iters >= cfg.iter_patience:
                return pairwise_groups(ctx.n_subgraphs, cfg.merge_group_size)
        return None

    def _do_merges(self, parts: Partition, states: list[BkState],
                   groups, record: IterationStats):
        merges: list[MergeEvent] = []
        for group in sorted({tuple(sorted(g)) for g in groups},
                            key=lambda grp: -grp[0]):
            if len(group) < 2:
                continue
            sizes = [serialized_size(parts.subgraphs[i]) for i in group]
            reused = cap_sum(sub.accumulated_flow for sub in parts.subgraphs)
            n_old = parts.n_subgraphs
            parts, merged_index = merge(parts, group)
            index_map = _merge_index_map(group, n_old)
            self.transport.on_merge(group, sizes, index_map)
            self.dual.remap_pairs(
                lambda pair: _merged_pair(pair, index_map))
            lo, hi = group[0], group[-1]
            states = (states[:lo] + [BkState(parts.subgraphs[merged_index])]
                      + states[hi + 1:])
            merges.append(MergeEvent(group, reused, parts.n_subgraphs))
        record.merges_performed = tuple(merges)
        return parts, states

    def _apply_split_hooks(self, parts: Partition, states: list[BkState]):
        if self.config.mode != "dynamic" or self.hooks.should_split is None:
            return parts, states
        ctx = HookContext(len(self.stats), -1, -1, 0, parts.n_subgraphs,
                          self.stats, parts)
        refinements = self.hooks.should_split(ctx) or []
        for subgraph_index, spec in sorted(refinements, key=lambda r: -r[0]):
            parts, states = _split_live_subgraph(parts, states,
                                                 subgraph_index, spec,
                                                 self.dual)
            self._audit("split", parts)
        if refinements:
            self.transport.assign_machines(parts.n_subgraphs)
        return parts, states

    def _dual_update(self, parts: Partition, states: list[BkState],
                     diffs) -> None:
        batches = dual_update(parts, self.dual, diffs)
        per_pair: dict[tuple[int, int], int] = {}
        for (pair, _v, _xa, _xb) in diffs:
            per_pair[pair] = per_pair.get(pair, 0) + 1
        for pair, count in per_pair.items():
            self.transport.on_deltas(pair, count)
        for idx in sorted(batches):
            states[idx].apply_tlink_deltas(batches[idx])
        self._audit("update", parts)

    def _global_assignment(self, parts: Partition,
                           labels: list[Assignment]) -> Assignment:
        x = [0] * self.original.n_vertices
        for idx in reversed(range(parts.n_subgraphs)):
            ids = parts.l2g[idx]
            lab = labels[idx]
            for local, v in enumerate(ids):
                x[v] = lab[local]   # lower-index subgraph wins on overlaps
        return x

    def _audit(self, event: str, parts: Partition) -> None:
        if self.audit_hook is not None:
            self.audit_hook(event, parts)


def _halved(step: Cap, n: int) -> Cap:
    for _ in range(n):
        step = step.halve()
    return step


def _ratio(num: Cap, den: Cap) -> float:
    if not den:
        return 1.0
    return float(num.as_fraction() / den.as_fraction())


def _merge_index_map(group: tuple[int, ...], n_old: int) -> dict[int, int]:
    lo, hi = group[0], group[-1]
    return {k: (k if k < lo else lo if k <= hi else k - (hi - lo))
            for k in range(n_old)}


def _merged_pair(pair: tuple[int, int], index_map) -> tuple[int, int] | None:
    a, b = index_map[pair[0]], index_map[pair[1]]
    if a == b:
        return None
    return (min(a, b), max(a, b))


def _split_live_subgraph(parts: Partition, states: list[BkState],
                         index: int, local_spec: RegionSpec,
                         dual: DualState):
    """Replace one live subgraph by its own chain split (dynamic refinement).

    ``local_spec`` is expressed in the subgraph's local vertex ids; existing
    overlaps with neighbors must be contained in the first / last piece.
    """
    if not 0 <= index < parts.n_subgraphs:
        raise ValueError(f"no subgraph at index {index}")
    sub = parts.subgraphs[index]
    pieces = split(sub, local_spec)
    offset = pieces.n_subgraphs - 1
    owner_l2g = parts.l2g[index]
    piece_l2g = [[owner_l2g[loc] for loc in ids] for ids in pieces.l2g]

    for ov in parts.overlaps:
        if ov.b == index and not set(ov.vertices) <= set(piece_l2g[0]):
            raise ValueError("refinement spec does not keep the left overlap "
                             "inside the first piece")
        if ov.a == index and not set(ov.vertices) <= set(piece_l2g[-1]):
            raise ValueError("refinement spec does not keep the right overlap "
                             "inside the last piece")

    new_subgraphs = list(parts.subgraphs)
    new_l2g = list(parts.l2g)
    new_subgraphs[index:index + 1] = pieces.subgraphs
    new_l2g[index:index + 1] = piece_l2g
    new_g2l = [{v: i for i, v in enumerate(ids)} for ids in new_l2g]

    def shift(i: int, side: str) -> int:
        if i < index:
            return i
        if i > index:
            return i + offset
        return index if side == "right_end_of_left" else index + offset

    overlaps = []
    for ov in parts.overlaps:
        a = shift(ov.a, "left_end_of_right")   # ov.a == index: right piece
        b = shift(ov.b, "right_end_of_left")   # ov.b == index: first piece
        overlaps.append(Overlap(min(a, b), max(a, b), ov.vertices))
    for j, piece_ov in enumerate(pieces.overlaps):
        shared = tuple(sorted(owner_l2g[loc] for loc in piece_ov.vertices))
        overlaps.append(Overlap(index + j, index + j + 1, shared))
    overlaps.sort(key=lambda ov: (ov.a, ov.b))

    depth = [0] * len(parts.split_depth)
    for ids in new_l2g:
        for v in ids:
            depth[v] += 1

    def pair_map(pair):
        a = shift(pair[0], "left_end_of_right")
        b = shift(pair[1], "right_end_of_left")
        return (min(a, b), max(a, b))

    dual.remap_pairs(pair_map)
    new_parts = Partition(new_subgraphs, new_l2g, new_g2l, overlaps, depth,
                          None)
    new_states = list(states)
    new_states[index:index + 1] = [BkState(p) for p in pieces.subgraphs]
    return new_parts, new_states


# -- public entry points ---------------------------------------------------------


def run(g: FlowGraph, config: SolverConfig,
        region_spec: RegionSpec | None = None,
        stripe_meta: StripeMeta | None = None,
        hooks: StrategyHooks | None = None,
        audit_hook=None) -> CutResult:
    return Engine(g, config, region_spec, stripe_meta, hooks,
                  audit_hook).run()


def solve_serial(g: FlowGraph) -> CutResult:
    return run(g, SolverConfig(n_subgraphs=1, mode="baseline_pbk"))


def solve_baseline_pbk(g: FlowGraph, config: SolverConfig,
                       region_spec: RegionSpec | None = None,
                       stripe_meta: StripeMeta | None = None) -> CutResult:
    if config.mode != "baseline_pbk":
        raise ValueError("config.mode must be baseline_pbk")
    return run(g, config, region_spec, stripe_meta)


def solve_naive_converged(g: FlowGraph, config: SolverConfig,
                          region_spec: RegionSpec | None = None,
                          stripe_meta: StripeMeta | None = None) -> CutResult:
    if config.mode != "naive_converged":
        raise ValueError("config.mode must be naive_converged")
    return run(g, config, region_spec, stripe_meta)


def solve_dynamic(g: FlowGraph, config: SolverConfig,
                  region_spec: RegionSpec | None = None,
                  stripe_meta: StripeMeta | None = None,
                  hooks: StrategyHooks | None = None,
                  audit_hook=None) -> CutResult:
    if config.mode != "dynamic":
        raise ValueError("config.mode must be dynamic")
    return run(g, config, region_spec, stripe_meta, hooks, audit_hook)
