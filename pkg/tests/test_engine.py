import itertools
import random

import pytest

from dyncut import (BkState, Cap, FlowGraph, RegionSpec, SolverConfig,
                    StrategyHooks, brute_force_min, build_seg1, build_seg2,
                    disagreement, dual_update, gen_synthetic,
                    polynomial_of_graph, posiform_of, run, schedule_hooks,
                    split, stripe_spec)
from dyncut.capacity import cap_sum
from dyncut.engine import DualState, pairwise_groups, solve_serial

from conftest import golden_graph, random_chain_instance, random_graph


def make_dual(step_init=Cap(1)):
    return DualState(step_init=step_init, step_min=Cap(1, 6))


# -- disagreement ------------------------------------------------------------------


def chain_parts(rng, n=10, k=2):
    g, spec = random_chain_instance(rng, n, k)
    return g, split(g, spec)


def test_disagreement_counts():
    rng = random.Random(1)
    g, parts = chain_parts(rng)
    labels = [[0] * sub.n_vertices for sub in parts.subgraphs]
    assert disagreement(parts, labels) == (0, [])

    # flip every overlap label on the higher side
    ov = parts.overlaps[0]
    for v in ov.vertices:
        labels[ov.b][parts.g2l[ov.b][v]] = 1
    ndiff, diffs = disagreement(parts, labels)
    assert ndiff == len(ov.vertices)
    assert all(d[2] == 0 and d[3] == 1 for d in diffs)


def test_disagreement_single_vertex():
    g = golden_graph()
    parts = split(g, RegionSpec.of([{0, 1}, {1}]))
    labels = [[0, 0], [1]]
    ndiff, diffs = disagreement(parts, labels)
    assert ndiff == 1
    assert diffs == [((0, 1), 1, 0, 1)]


# -- dual update -------------------------------------------------------------------


def test_dual_update_empty_diffs_is_noop():
    rng = random.Random(2)
    g, parts = chain_parts(rng)
    before = [polynomial_of_graph(sub) for sub in parts.subgraphs]
    batches = dual_update(parts, make_dual(), [])
    assert batches == {}
    after = [polynomial_of_graph(sub) for sub in parts.subgraphs]
    assert before == after


def test_dual_update_moves_coefficients_toward_agreement_exactly():
    # one shared vertex, side a labels 0 / side b labels 1: side a's linear
    # coefficient must drop, side b's must rise, sum staying exactly fixed
    g = FlowGraph(3)
    g.set_source_cap(0, Cap(5))
    g.set_source_cap(1, Cap(4))
    g.set_sink_cap(1, Cap(6))
    g.set_sink_cap(2, Cap(5))
    g.add_arc(0, 1, Cap(2), Cap(2))
    g.add_arc(1, 2, Cap(2), Cap(2))
    parts = split(g, RegionSpec.of([{0, 1}, {1, 2}]))
    fa0 = polynomial_of_graph(parts.subgraphs[0])
    fb0 = polynomial_of_graph(parts.subgraphs[1])
    la, lb = parts.g2l[0][1], parts.g2l[1][1]

    dual = make_dual()
    batches = dual_update(parts, dual, [((0, 1), 1, 0, 1)])
    for idx, batch in batches.items():
        BkState(parts.subgraphs[idx]).apply_tlink_deltas(batch)

    fa1 = polynomial_of_graph(parts.subgraphs[0])
    fb1 = polynomial_of_graph(parts.subgraphs[1])
    moved = dual.by_pair[(0, 1)][1].lam
    assert moved == Cap(-1)
    assert fa1.linear(la) - fa0.linear(la) == Cap(-1)
    assert fb1.linear(lb) - fb0.linear(lb) == Cap(1)
    # everything else untouched; the pair's total function unchanged exactly
    assert fa1.l2 == fa0.l2 and fb1.l2 == fb0.l2
    assert fa1.l0 + fb1.l0 == fa0.l0 + fb0.l0
    assert all(fa1.linear(i) == fa0.linear(i)
               for i in range(parts.subgraphs[0].n_vertices) if i != la)


def test_dual_update_step_doubles_on_repeat():
    g = FlowGraph(2)
    g.set_source_cap(0, Cap(16))
    g.set_sink_cap(0, Cap(0))
    g.set_source_cap(1, Cap(16))
    parts = split(g, RegionSpec.of([{0}, {0, 1}]))
    dual = make_dual()
    diff = [((0, 1), 0, 0, 1)]
    dual_update(parts, dual, diff)
    assert dual.by_pair[(0, 1)][0].step == Cap(1)
    dual_update(parts, dual, diff)
    assert dual.by_pair[(0, 1)][0].step == Cap(2)
    dual_update(parts, dual, [((0, 1), 0, 1, 0)])   # flipped sign halves
    assert dual.by_pair[(0, 1)][0].step == Cap(1)


def test_dual_update_capped_by_available_capacity():
    # no terminal capacity anywhere: the update cannot move anything
    g = FlowGraph(3)
    g.add_arc(0, 1, Cap(3), Cap(3))
    g.add_arc(1, 2, Cap(3), Cap(3))
    parts = split(g, RegionSpec.of([{0, 1}, {1, 2}]))
    dual = make_dual()
    batches = dual_update(parts, dual, [((0, 1), 1, 0, 1)])
    assert batches == {}
    assert dual.by_pair[(0, 1)][1].lam == Cap(0)


# -- modes -------------------------------------------------------------------------


def test_single_subgraph_equals_serial():
    rng = random.Random(3)
    for _ in range(10):
        g = random_graph(rng, rng.randint(1, 9))
        res = run(g, SolverConfig(n_subgraphs=1, mode="baseline_pbk"))
        best, argmins = brute_force_min(polynomial_of_graph(g))
        assert res.converged and res.iterations == 1
        assert res.cut_value == best
        assert tuple(res.assignment) in argmins


def test_baseline_converges_on_small_seg2():
    img = gen_synthetic("seg2_random", 16, 16, seed=31)
    g = build_seg2(img)
    serial = solve_serial(g)
    spec, meta = stripe_spec(16, 16, 2)
    res = run(g, SolverConfig(n_subgraphs=2, mode="baseline_pbk"), spec, meta)
    assert res.converged
    assert res.cut_value == serial.cut_value


def test_baseline_hits_cap_on_boundary_seeded_worst_case():
    img = gen_synthetic("seg1_worst", 32, 32, seed=7)
    g = build_seg1(img)
    spec, meta = stripe_spec(32, 32, 4)
    res = run(g, SolverConfig(n_subgraphs=4, mode="baseline_pbk",
                              max_iterations=50), spec, meta)
    assert not res.converged
    assert res.iterations == 50


def test_naive_immediate_agreement_needs_one_iteration():
    g = FlowGraph(3)
    for i in range(3):
        g.set_source_cap(i, Cap(5))   # everything lands on the source side
    g.add_arc(0, 1, Cap(1), Cap(1))
    g.add_arc(1, 2, Cap(1), Cap(1))
    res = run(g, SolverConfig(n_subgraphs=2, mode="naive_converged"),
              RegionSpec.of([{0, 1}, {1, 2}]))
    assert res.converged and res.iterations == 1
    assert not any(s.merges_performed for s in res.stats)


def test_naive_converges_where_baseline_cannot():
    img = gen_synthetic("seg1_worst", 32, 32, seed=7)
    g = build_seg1(img)
    serial = solve_serial(g)
    spec, meta = stripe_spec(32, 32, 4)
    res = run(g, SolverConfig(n_subgraphs=4, iter_patience=20,
                              mode="naive_converged", max_iterations=10000),
              spec, meta)
    assert res.converged
    assert res.cut_value == serial.cut_value
    assert res.iterations <= res.iteration_bound


def test_naive_patience_one_merges_quickly():
    rng = random.Random(5)
    for _ in range(10):
        g, spec = random_chain_instance(rng, 12, 4)
        res = run(g, SolverConfig(n_subgraphs=4, iter_patience=1,
                                  mode="naive_converged"), spec)
        serial = solve_serial(g)
        assert res.converged
        assert res.cut_value == serial.cut_value
        merge_rounds = sum(1 for s in res.stats if s.merges_performed)
        assert merge_rounds <= 2          # ceil(log2(4)) pairwise rounds


def test_dynamic_defaults_bit_identical_to_naive():
    rng = random.Random(6)
    for _ in range(20):
        g, spec = random_chain_instance(rng, rng.randint(8, 14), 3)
        a = run(g, SolverConfig(n_subgraphs=3, iter_patience=3,
                                mode="naive_converged"), spec)
        b = run(g, SolverConfig(n_subgraphs=3, iter_patience=3,
                                mode="dynamic"), spec)
        assert a == b


def test_dynamic_merge_all_after_first_iteration():
    rng = random.Random(7)
    for _ in range(10):
        g, spec = random_chain_instance(rng, 12, 4)
        res = run(g, SolverConfig(n_subgraphs=4, mode="dynamic"), spec,
                  hooks=schedule_hooks(merge_period=1, group_size=4))
        serial = solve_serial(g)
        assert res.converged and res.iterations <= 2
        assert res.cut_value == serial.cut_value


def test_dynamic_schedule_bound():
    # merge every K iterations, l at a time: the last merge happens by
    # iteration K*ceil(log_l N) and one more iteration certifies agreement
    rng = random.Random(8)
    for _ in range(10):
        g, spec = random_chain_instance(rng, 17, 8)
        res = run(g, SolverConfig(n_subgraphs=8, mode="dynamic"), spec,
                  hooks=schedule_hooks(merge_period=2, group_size=2))
        serial = solve_serial(g)
        assert res.converged
        assert res.cut_value == serial.cut_value
        merge_iters = [s.iteration for s in res.stats if s.merges_performed]
        assert len(merge_iters) <= 3                 # ceil(log2 8)
        assert res.iterations <= 2 * 3 + 1


def test_dynamic_split_hook_refines_and_still_converges():
    img = gen_synthetic("seg2_random", 12, 6, seed=9)
    g = build_seg2(img)
    serial = solve_serial(g)
    spec, meta = stripe_spec(12, 6, 2)
    fired = []

    def should_split(ctx):
        if fired or ctx.n_subgraphs != 2:
            return None
        fired.append(True)
        sub = ctx.partition.subgraphs[0]
        cols = sub.n_vertices // 6          # local ids are row-major
        left = {r * cols + c for r in range(6) for c in range(4)}
        right = {r * cols + c for r in range(6) for c in range(3, cols)}
        return [(0, RegionSpec.of([left, right]))]   # share local column 3

    res = run(g, SolverConfig(n_subgraphs=2, iter_patience=3,
                              mode="dynamic"), spec, meta,
              hooks=StrategyHooks(should_split=should_split))
    assert fired
    assert res.converged
    assert res.cut_value == serial.cut_value


def test_invalid_merge_group_from_hook_raises():
    rng = random.Random(10)
    g, spec = random_chain_instance(rng, 12, 4)
    hooks = StrategyHooks(inner_stop=lambda ctx: True,
                          should_merge=lambda ctx: [(0, 2)])
    with pytest.raises(ValueError, match="contiguous"):
        run(g, SolverConfig(n_subgraphs=4, mode="dynamic"), spec, hooks=hooks)


# -- engine-wide invariants -----------------------------------------------------------


def global_value(parts, x):
    """Sum of subgraph posiform values at the restriction of x (exact)."""
    total = Cap(0)
    for k, sub in enumerate(parts.subgraphs):
        local_x = [x[v] for v in parts.l2g[k]]
        total = total + posiform_of(sub).value_at(local_x)
    return total


def test_decomposition_value_is_invariant_every_step():
    rng = random.Random(11)
    for _ in range(15):
        n = rng.randint(6, 10)
        g, spec = random_chain_instance(rng, n, rng.choice([2, 3]))
        f = posiform_of(g)
        assignments = list(itertools.product((0, 1), repeat=n))

        def audit(event, parts):
            for x in assignments:
                assert global_value(parts, x) == f.value_at(list(x))

        run(g, SolverConfig(n_subgraphs=len(spec.regions), iter_patience=2,
                            mode="naive_converged"), spec, audit_hook=audit)


def test_convergence_implies_global_argmin():
    rng = random.Random(12)
    for _ in range(40):
        n = rng.randint(6, 12)
        g, spec = random_chain_instance(rng, n, rng.choice([2, 3]))
        res = run(g, SolverConfig(n_subgraphs=len(spec.regions),
                                  iter_patience=rng.choice([2, 3, 5]),
                                  mode="naive_converged"), spec)
        best, argmins = brute_force_min(polynomial_of_graph(g))
        assert res.converged
        assert res.cut_value == best
        assert tuple(res.assignment) in argmins


def test_iteration_bound_holds_on_every_run():
    rng = random.Random(13)
    for _ in range(40):
        n = rng.randint(6, 12)
        k = rng.choice([2, 3, 4])
        if n < 2 * k - 1:
            continue
        g, spec = random_chain_instance(rng, n, k)
        res = run(g, SolverConfig(n_subgraphs=k,
                                  iter_patience=rng.choice([2, 3, 5]),
                                  mode="naive_converged"), spec)
        assert res.converged
        assert res.iterations <= res.iteration_bound


def test_reused_flow_ratio_in_unit_interval():
    rng = random.Random(14)
    for _ in range(30):
        g, spec = random_chain_instance(rng, 10, 2)
        res = run(g, SolverConfig(n_subgraphs=2, iter_patience=2,
                                  mode="naive_converged"), spec)
        assert res.converged
        assert 0.0 <= res.relative_reused_flow <= 1.0


def test_stats_flows_match_dual_bound_growth():
    rng = random.Random(15)
    g, spec = random_chain_instance(rng, 12, 2)
    res = run(g, SolverConfig(n_subgraphs=2, iter_patience=3,
                              mode="naive_converged"), spec)
    for s in res.stats:
        assert s.ndiff >= 0
        assert all(f >= Cap(0) for f in s.flows)
    bounds = [s.dual_bound for s in res.stats]
    assert all(b1 <= b2 for b1, b2 in zip(bounds, bounds[1:]))


def test_deterministic_across_runs_and_worker_counts():
    img = gen_synthetic("seg2_random", 12, 12, seed=16)
    g = build_seg2(img)
    spec, meta = stripe_spec(12, 12, 3)

    def once(workers):
        cfg = SolverConfig(n_subgraphs=3, iter_patience=4,
                           mode="naive_converged", n_workers=workers)
        return run(g, cfg, spec, meta)

    a, b, c = once(1), once(1), once(4)
    assert a == b == c


def test_pairwise_groups_leftover():
    assert pairwise_groups(5) == [(0, 1), (2, 3)]
    assert pairwise_groups(8, 3) == [(0, 1, 2), (3, 4, 5)]
    assert pairwise_groups(1) == []
