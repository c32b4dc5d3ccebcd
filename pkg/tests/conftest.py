"""Shared generators for the randomized suites.

Chain instances are built spec-first: pick overlapping vertex-id spans, then
draw arcs only inside regions, so every generated graph satisfies the
separability requirement of its own region spec by construction.
"""

from __future__ import annotations

import random

from dyncut import Cap, FlowGraph, RegionSpec


def random_graph(rng: random.Random, n: int, cap_max: int = 16,
                 arc_factor: float = 2.0) -> FlowGraph:
    g = FlowGraph(n)
    for i in range(n):
        g.set_source_cap(i, Cap(rng.randint(0, cap_max)))
        g.set_sink_cap(i, Cap(rng.randint(0, cap_max)))
    if n > 1:
        for _ in range(int(arc_factor * n)):
            u, v = rng.sample(range(n), 2)
            g.add_arc(u, v, Cap(rng.randint(0, cap_max)),
                      Cap(rng.randint(0, cap_max)))
    return g


def random_spans(rng: random.Random, n: int, n_regions: int,
                 max_overlap: int = 2) -> list[tuple[int, int]]:
    """Overlapping contiguous spans covering 0..n-1."""
    cuts = sorted(rng.sample(range(1, n), n_regions - 1)) if n_regions > 1 else []
    bounds = [0] + cuts + [n]
    spans = []
    for k in range(n_regions):
        first, last = bounds[k], bounds[k + 1] - 1
        if k < n_regions - 1:
            width = rng.randint(1, max_overlap)
            last = min(n - 1, last + width)
        spans.append((first, last))
    return spans


def random_chain_instance(rng: random.Random, n: int, n_regions: int,
                          cap_max: int = 16):
    """(graph, spec) pair where arcs respect the chain regions."""
    while True:
        spans = random_spans(rng, n, n_regions)
        spec = RegionSpec.of(frozenset(range(first, last + 1))
                             for first, last in spans)
        try:
            spec.validate(n)
            break
        except ValueError:
            continue
    g = FlowGraph(n)
    for i in range(n):
        g.set_source_cap(i, Cap(rng.randint(0, cap_max)))
        g.set_sink_cap(i, Cap(rng.randint(0, cap_max)))
    for _ in range(rng.randint(n, 3 * n)):
        first, last = spans[rng.randrange(n_regions)]
        if last > first:
            u, v = rng.sample(range(first, last + 1), 2)
            g.add_arc(u, v, Cap(rng.randint(0, cap_max)),
                      Cap(rng.randint(0, cap_max)))
    return g, spec


def golden_graph() -> FlowGraph:
    """Two-vertex network whose polynomial is 8 - 4*x0 + 3*x1 - 3*x0*x1."""
    g = FlowGraph(2)
    g.set_source_cap(1, Cap(4))
    g.set_sink_cap(0, Cap(6))
    g.set_sink_cap(1, Cap(2))
    g.add_arc(0, 1, Cap(1), Cap(2))
    return g
