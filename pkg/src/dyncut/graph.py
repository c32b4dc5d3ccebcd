"""Directed s-t flow network with exact shared-scale fixed-point capacities.

All capacities in one graph live at a single power-of-two scale
(``log2_den``); the stored numbers are integer numerators at that scale.  That
keeps the maxflow inner loop in plain integer arithmetic while still allowing
exact halving when a graph is split.

A vertex ``i`` carries two terminal links: ``source s->i`` and ``sink i->t``.
Neighbor arcs are stored once per unordered pair ``(u, v)`` with independent
residual capacities for both directions (the standard residual-graph layout).
``accumulated_flow`` is the constant absorbed so far by flow pushes and
reparameterizations; solver operations only ever increase it.
"""

from __future__ import annotations

from .capacity import Cap

Assignment = list[int]  # x[i] in {0,1}; 0 = source side, 1 = sink side


class FlowGraph:
    """s-t network over vertices ``0..n_vertices-1`` (terminals implicit)."""

    __slots__ = ("n_vertices", "log2_den", "src", "snk",
                 "arc_u", "arc_v", "arc_fwd", "arc_rev", "arc_index",
                 "flow_num")

    def __init__(self, n_vertices: int):
        if n_vertices < 0:
            raise ValueError("vertex count must be non-negative")
        self.n_vertices = n_vertices
        self.log2_den = 0
        self.src = [0] * n_vertices   # numerators of s->i capacities
        self.snk = [0] * n_vertices   # numerators of i->t capacities
        self.arc_u: list[int] = []
        self.arc_v: list[int] = []
        self.arc_fwd: list[int] = []  # residual u->v
        self.arc_rev: list[int] = []  # residual v->u
        self.arc_index: dict[tuple[int, int], int] = {}
        self.flow_num = 0

    # -- scale handling -----------------------------------------------------

    def ensure_scale(self, log2_den: int) -> None:
        """Rescale all numerators so the graph is stored at least this fine."""
        if log2_den <= self.log2_den:
            return
        shift = log2_den - self.log2_den
        self.src = [x << shift for x in self.src]
        self.snk = [x << shift for x in self.snk]
        self.arc_fwd = [x << shift for x in self.arc_fwd]
        self.arc_rev = [x << shift for x in self.arc_rev]
        self.flow_num <<= shift
        self.log2_den = log2_den

    def normalize(self) -> None:
        """Clear common factors of two so the scale is as coarse as possible."""
        shift = self.log2_den
        if shift == 0:
            return
        for x in (*self.src, *self.snk, *self.arc_fwd, *self.arc_rev, self.flow_num):
            if x:
                shift = min(shift, (x & -x).bit_length() - 1)
                if shift == 0:
                    return
        self._shift_down(shift)

    def _shift_down(self, shift: int) -> None:
        if shift <= 0:
            return
        self.src = [x >> shift for x in self.src]
        self.snk = [x >> shift for x in self.snk]
        self.arc_fwd = [x >> shift for x in self.arc_fwd]
        self.arc_rev = [x >> shift for x in self.arc_rev]
        self.flow_num >>= shift
        self.log2_den -= shift

    def _to_num(self, cap: Cap) -> int:
        self.ensure_scale(cap.log2_den)
        return cap.num << (self.log2_den - cap.log2_den)

    def _cap(self, num: int) -> Cap:
        return Cap(num, self.log2_den)

    # -- terminal links -----------------------------------------------------

    def _check_vertex(self, i: int) -> None:
        if not 0 <= i < self.n_vertices:
            raise ValueError(f"unknown vertex id {i}")

    def source_cap(self, i: int) -> Cap:
        self._check_vertex(i)
        return self._cap(self.src[i])

    def sink_cap(self, i: int) -> Cap:
        self._check_vertex(i)
        return self._cap(self.snk[i])

    def set_source_cap(self, i: int, cap: Cap) -> None:
        self._check_vertex(i)
        if cap.num < 0:
            raise ValueError("capacities must be non-negative")
        self.src[i] = self._to_num(cap)

    def set_sink_cap(self, i: int, cap: Cap) -> None:
        self._check_vertex(i)
        if cap.num < 0:
            raise ValueError("capacities must be non-negative")
        self.snk[i] = self._to_num(cap)

    def add_source_cap(self, i: int, cap: Cap) -> None:
        self.set_source_cap(i, self.source_cap(i) + cap)

    def add_sink_cap(self, i: int, cap: Cap) -> None:
        self.set_sink_cap(i, self.sink_cap(i) + cap)

    @property
    def accumulated_flow(self) -> Cap:
        return self._cap(self.flow_num)

    def add_accumulated_flow(self, cap: Cap) -> None:
        self.flow_num += self._to_num(cap)
        if self.flow_num < 0:
            raise ValueError("accumulated flow must stay non-negative")

    # -- neighbor arcs --------------------------------------------------------

    def add_arc(self, u: int, v: int, cap_uv: Cap, cap_vu: Cap = Cap(0)) -> None:
        """Add capacity on the pair (u, v); antiparallel arcs fold together."""
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise ValueError("self-loops are not allowed")
        if cap_uv.num < 0 or cap_vu.num < 0:
            raise ValueError("capacities must be non-negative")
        if u > v:
            u, v, cap_uv, cap_vu = v, u, cap_vu, cap_uv
        r = self.arc_index.get((u, v))
        if r is None:
            r = len(self.arc_u)
            self.arc_u.append(u)
            self.arc_v.append(v)
            self.arc_fwd.append(0)
            self.arc_rev.append(0)
            self.arc_index[(u, v)] = r
        self.arc_fwd[r] += self._to_num(cap_uv)
        self.arc_rev[r] += self._to_num(cap_vu)

    def arc_cap(self, u: int, v: int) -> Cap:
        """Directed capacity u->v (zero when no record exists)."""
        key, fwd = ((u, v), True) if u < v else ((v, u), False)
        r = self.arc_index.get(key)
        if r is None:
            return Cap(0)
        return self._cap(self.arc_fwd[r] if fwd else self.arc_rev[r])

    def n_arcs(self) -> int:
        return len(self.arc_u)

    def arcs(self):
        """Yield (u, v, cap_uv, cap_vu) per stored record, u < v."""
        for r in range(len(self.arc_u)):
            yield (self.arc_u[r], self.arc_v[r],
                   self._cap(self.arc_fwd[r]), self._cap(self.arc_rev[r]))

    # -- whole-graph helpers ---------------------------------------------------

    def copy(self) -> "FlowGraph":
        g = FlowGraph(self.n_vertices)
        g.log2_den = self.log2_den
        g.src = list(self.src)
        g.snk = list(self.snk)
        g.arc_u = list(self.arc_u)
        g.arc_v = list(self.arc_v)
        g.arc_fwd = list(self.arc_fwd)
        g.arc_rev = list(self.arc_rev)
        g.arc_index = dict(self.arc_index)
        g.flow_num = self.flow_num
        return g

    def validate(self) -> None:
        assert all(x >= 0 for x in self.src)
        assert all(x >= 0 for x in self.snk)
        assert all(x >= 0 for x in self.arc_fwd)
        assert all(x >= 0 for x in self.arc_rev)
        assert self.flow_num >= 0
        assert len(self.arc_index) == len(self.arc_u)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FlowGraph):
            return NotImplemented
        return self._snapshot() == other._snapshot()

    def _snapshot(self):
        def caps(nums):
            return tuple(Cap(x, self.log2_den) for x in nums)

        pairs = {}
        for r in range(len(self.arc_u)):
            if self.arc_fwd[r] or self.arc_rev[r]:
                pairs[(self.arc_u[r], self.arc_v[r])] = (
                    Cap(self.arc_fwd[r], self.log2_den),
                    Cap(self.arc_rev[r], self.log2_den))
        return (self.n_vertices, caps(self.src), caps(self.snk),
                tuple(sorted(pairs.items())), Cap(self.flow_num, self.log2_den))

    def __repr__(self) -> str:
        return (f"FlowGraph(n={self.n_vertices}, arcs={len(self.arc_u)}, "
                f"scale=2^-{self.log2_den}, flow={self.accumulated_flow})")
