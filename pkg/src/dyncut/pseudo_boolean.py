"""Pseudo-boolean views of a cut problem and the brute-force oracle.

Two exact representations are maintained:

* ``Posiform`` -- non-negative coefficients ``a_src[i] * x_i``
  (source link), ``a_snk[i] * (1-x_i)`` (sink link) and
  ``a_pair[(i,j)] * (1-x_i) * x_j`` (directed neighbor arc), in one-to-one
  correspondence with a ``FlowGraph``.  The graph's accumulated flow rides
  along as an explicit constant so that reparameterization checks are a
  single comparison.

* ``MultilinearPolynomial`` -- unique form
  ``l0 + sum l1[i] x_i + sum l2[(i,j)] x_i x_j`` with ``l2 <= 0`` for any
  graph-derived function.

Everything here is arithmetic-exact (``Cap`` throughout).  ``brute_force_min``
is the independent oracle used by the solver and engine test suites; it
enumerates all assignments and never goes near the flow machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .capacity import Cap, cap_sum
from .graph import Assignment, FlowGraph


@dataclass
class Posiform:
    """Non-negative-coefficient form mirroring a flow graph edge-for-edge."""

    n: int
    a_src: dict[int, Cap] = field(default_factory=dict)
    a_snk: dict[int, Cap] = field(default_factory=dict)
    a_pair: dict[tuple[int, int], Cap] = field(default_factory=dict)  # ordered (i, j)
    constant: Cap = Cap(0)

    def __post_init__(self):
        self.a_src = {i: c for i, c in self.a_src.items() if c}
        self.a_snk = {i: c for i, c in self.a_snk.items() if c}
        self.a_pair = {ij: c for ij, c in self.a_pair.items() if c}

    def value_at(self, x: Assignment) -> Cap:
        """Direct term-by-term evaluation (kept independent of polynomial_of)."""
        if len(x) != self.n:
            raise ValueError("assignment length mismatch")
        total = self.constant
        for i, c in self.a_src.items():
            if x[i]:
                total = total + c
        for i, c in self.a_snk.items():
            if not x[i]:
                total = total + c
        for (i, j), c in self.a_pair.items():
            if not x[i] and x[j]:
                total = total + c
        return total

    def dump(self) -> str:
        parts = [str(self.constant)] if self.constant else []
        for i in sorted(self.a_src):
            parts.append(f"{self.a_src[i]}*x{i}")
        for i in sorted(self.a_snk):
            parts.append(f"{self.a_snk[i]}*~x{i}")
        for i, j in sorted(self.a_pair):
            parts.append(f"{self.a_pair[(i, j)]}*~x{i}*x{j}")
        return " + ".join(parts) if parts else "0"


@dataclass
class MultilinearPolynomial:
    """Canonical polynomial form; unordered quadratic keys (i < j)."""

    n: int
    l0: Cap = Cap(0)
    l1: dict[int, Cap] = field(default_factory=dict)
    l2: dict[tuple[int, int], Cap] = field(default_factory=dict)

    def __post_init__(self):
        self.l1 = {i: c for i, c in self.l1.items() if c}
        self.l2 = {ij: c for ij, c in self.l2.items() if c}

    def linear(self, i: int) -> Cap:
        return self.l1.get(i, Cap(0))

    def quad(self, i: int, j: int) -> Cap:
        if i > j:
            i, j = j, i
        return self.l2.get((i, j), Cap(0))

    def dump(self) -> str:
        parts = [str(self.l0)]
        for i in sorted(self.l1):
            parts.append(f"{self.l1[i]}*x{i}")
        for i, j in sorted(self.l2):
            parts.append(f"{self.l2[(i, j)]}*x{i}*x{j}")
        return " + ".join(parts)


def posiform_of(g: FlowGraph) -> Posiform:
    """Edge-for-edge transcription of the graph; bijective with graph_of."""
    p = Posiform(g.n_vertices)
    for i in range(g.n_vertices):
        c = g.source_cap(i)
        if c:
            p.a_src[i] = c
        c = g.sink_cap(i)
        if c:
            p.a_snk[i] = c
    for u, v, fwd, rev in g.arcs():
        if fwd:
            p.a_pair[(u, v)] = p.a_pair.get((u, v), Cap(0)) + fwd
        if rev:
            p.a_pair[(v, u)] = p.a_pair.get((v, u), Cap(0)) + rev
    p.constant = g.accumulated_flow
    return p


def graph_of(p: Posiform) -> FlowGraph:
    """Inverse of posiform_of; rejects negative coefficients."""
    g = FlowGraph(p.n)
    for coeffs in (p.a_src, p.a_snk, p.a_pair):
        for key, c in coeffs.items():
            if c.num < 0:
                raise ValueError(f"negative posiform coefficient at {key}")
    for i, c in p.a_src.items():
        g.set_source_cap(i, c)
    for i, c in p.a_snk.items():
        g.set_sink_cap(i, c)
    for (i, j), c in p.a_pair.items():
        g.add_arc(i, j, c)
    if p.constant.num < 0:
        raise ValueError("negative accumulated-flow constant")
    g.add_accumulated_flow(p.constant)
    return g


def polynomial_of(p: Posiform) -> MultilinearPolynomial:
    """Expand the posiform: ``a*(1-x) = a - a*x`` and
    ``a*(1-x_i)*x_j = a*x_j - a*x_i*x_j``."""
    f = MultilinearPolynomial(p.n)
    l0 = p.constant
    l1: dict[int, Cap] = {}
    l2: dict[tuple[int, int], Cap] = {}

    def bump(d, k, c):
        d[k] = d.get(k, Cap(0)) + c

    for i, c in p.a_src.items():
        bump(l1, i, c)
    for i, c in p.a_snk.items():
        l0 = l0 + c
        bump(l1, i, -c)
    for (i, j), c in p.a_pair.items():
        bump(l1, j, c)
        bump(l2, (i, j) if i < j else (j, i), -c)
    f.l0 = l0
    f.l1 = {i: c for i, c in l1.items() if c}
    f.l2 = {ij: c for ij, c in l2.items() if c}
    return f


def polynomial_of_graph(g: FlowGraph) -> MultilinearPolynomial:
    return polynomial_of(posiform_of(g))


def evaluate(f: MultilinearPolynomial, x: Assignment) -> Cap:
    if len(x) != f.n:
        raise ValueError("assignment length mismatch")
    total = f.l0
    for i, c in f.l1.items():
        if x[i]:
            total = total + c
    for (i, j), c in f.l2.items():
        if x[i] and x[j]:
            total = total + c
    return total


def cut_cost(g: FlowGraph, x: Assignment) -> Cap:
    """Cost of the cut induced by x, summed directly over edges.

    Independent oracle for the polynomial view: source links pay when their
    vertex sits on the sink side, sink links when on the source side, and a
    neighbor arc u->v pays when u is on the source side and v on the sink
    side.  The accumulated-flow constant is included.
    """
    if len(x) != g.n_vertices:
        raise ValueError("assignment length mismatch")
    total = g.accumulated_flow
    for i in range(g.n_vertices):
        if x[i]:
            total = total + g.source_cap(i)
        else:
            total = total + g.sink_cap(i)
    for u, v, fwd, rev in g.arcs():
        if not x[u] and x[v]:
            total = total + fwd
        if not x[v] and x[u]:
            total = total + rev
    return total


MAX_BRUTE_FORCE_N = 24


def brute_force_min(f: MultilinearPolynomial) -> tuple[Cap, set[tuple[int, ...]]]:
    """Exhaustive minimum and the complete argmin set (n capped at 24)."""
    n = f.n
    if n > MAX_BRUTE_FORCE_N:
        raise ValueError(f"brute force limited to n <= {MAX_BRUTE_FORCE_N}")
    if n == 0:
        return f.l0, {()}

    # Work on a common integer scale so the enumeration is pure int math.
    scale = f.l0.log2_den
    for c in f.l1.values():
        scale = max(scale, c.log2_den)
    for c in f.l2.values():
        scale = max(scale, c.log2_den)

    def at(c: Cap) -> int:
        return c.num << (scale - c.log2_den)

    l0 = at(f.l0)
    l1 = [at(f.l1.get(i, Cap(0))) for i in range(n)]
    l2 = [(i, j, at(c)) for (i, j), c in sorted(f.l2.items())]

    bound = abs(l0) + sum(abs(c) for c in l1) + sum(abs(c) for _, _, c in l2)
    masks = np.arange(1 << n, dtype=np.int64)
    if bound < (1 << 62):
        values = np.full(1 << n, l0, dtype=np.int64)
        bits = [((masks >> i) & 1) for i in range(n)]
        for i in range(n):
            if l1[i]:
                values += bits[i] * l1[i]
        for i, j, c in l2:
            values += (bits[i] & bits[j]) * c
    else:  # exact big-int fallback
        values = np.array(
            [l0
             + sum(l1[i] for i in range(n) if m >> i & 1)
             + sum(c for i, j, c in l2 if m >> i & 1 and m >> j & 1)
             for m in range(1 << n)], dtype=object)

    best = values.min()
    argmins = {tuple(int(m >> i & 1) for i in range(n))
               for m in np.flatnonzero(values == best)}
    return Cap(int(best), scale), argmins


def poly_equal_up_to_constant(
        f: MultilinearPolynomial, g: MultilinearPolynomial) -> Cap | None:
    """Return ``f.l0 - g.l0`` when all non-constant coefficients match exactly,
    else None."""
    if f.n != g.n:
        raise ValueError("polynomials over different vertex universes")
    if f.l1 != g.l1 or f.l2 != g.l2:
        return None
    return f.l0 - g.l0
