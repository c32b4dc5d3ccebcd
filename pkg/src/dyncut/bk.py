"""Serial augmenting-path maxflow with two search trees and warm restart.

The solver keeps an S-tree rooted at the source and a T-tree rooted at the
sink, grows them from active vertices, augments along collision paths, and
re-adopts orphans instead of rebuilding trees (the classic two-tree scheme).
All capacities are integer numerators at the owning graph's shared scale, so
every push is exact and termination is guaranteed.

Determinism is chosen over speed heuristics: active vertices are processed in
ascending vertex id (a lazy min-heap), adjacency is scanned in ascending
neighbor order, and orphans are handled FIFO.

Warm restart: ``apply_tlink_deltas`` edits terminal capacities, reparameterizes
away negative values, and marks the touched vertices dirty; the next
``solve`` call repairs only the affected tree fragments and pushes only the
new flow.  ``solve`` returns the flow pushed *by that call* (equal to the
graph's accumulated-flow increase).
"""

from __future__ import annotations

from collections import deque
from heapq import heappop, heappush

from .capacity import Cap
from .graph import Assignment, FlowGraph

FREE, TREE_S, TREE_T = 0, 1, 2
P_NONE = -2   # no parent (free or pending orphan)
P_TERM = -1   # parent is the owning tree's terminal


class BkState:
    """Single-owner solver state bound to one FlowGraph."""

    __slots__ = ("g", "adj", "tree", "parent", "_heap", "_in_active",
                 "_orphans", "_dirty", "_solved_once")

    def __init__(self, g: FlowGraph):
        self.g = g
        n = g.n_vertices
        adj: list[list[int]] = [[] for _ in range(n)]
        for r in range(len(g.arc_u)):
            adj[g.arc_u[r]].append(2 * r)
            adj[g.arc_v[r]].append(2 * r + 1)
        for i in range(n):
            adj[i].sort(key=self._head)
        self.adj = adj
        self.tree = bytearray(n)
        self.parent = [P_NONE] * n
        self._heap: list[int] = []
        self._in_active = bytearray(n)
        self._orphans: deque[int] = deque()
        self._dirty = set(range(n))
        self._solved_once = False

    # -- directed-edge helpers (edge e covers arc record e>>1) ---------------

    def _head(self, e: int) -> int:
        r = e >> 1
        return self.g.arc_v[r] if e & 1 == 0 else self.g.arc_u[r]

    def _rcap(self, e: int) -> int:
        r = e >> 1
        return self.g.arc_fwd[r] if e & 1 == 0 else self.g.arc_rev[r]

    def _add_rcap(self, e: int, d: int) -> None:
        r = e >> 1
        if e & 1 == 0:
            self.g.arc_fwd[r] += d
        else:
            self.g.arc_rev[r] += d

    # -- active set -----------------------------------------------------------

    def _activate(self, v: int) -> None:
        if not self._in_active[v]:
            self._in_active[v] = 1
            heappush(self._heap, v)

    def _pop_active(self) -> int | None:
        while self._heap:
            v = heappop(self._heap)
            if self._in_active[v]:
                self._in_active[v] = 0
                return v
        return None

    # -- public API -------------------------------------------------------------

    def solve(self, audit_hook=None) -> tuple[Cap, Assignment]:
        """Push all remaining flow; return (flow pushed now, min-cut labels).

        ``audit_hook(state, pushed)`` is called after each individual
        augmentation with the exact amount pushed (diagnostics/tests only).
        """
        g = self.g
        flow0 = g.flow_num
        scale0 = g.log2_den
        self._repair()
        if audit_hook is not None and g.flow_num != flow0:
            # report the terminal-pair cancellations performed during repair
            audit_hook(self, Cap(g.flow_num - flow0, g.log2_den))
            flow0, scale0 = g.flow_num, g.log2_den
        while True:
            path = self._grow()
            if path is None:
                break
            before = g.flow_num
            self._augment(*path)
            if audit_hook is not None:
                audit_hook(self, Cap(g.flow_num - before, g.log2_den))
            self._adopt_orphans()
        self._solved_once = True
        x = [1 if t == TREE_T else 0 for t in self.tree]
        pushed = Cap(g.flow_num, g.log2_den) - Cap(flow0, scale0)
        return pushed, x

    def apply_tlink_deltas(self, deltas: list[tuple[int, Cap, Cap]]) -> None:
        """Apply (vertex, d_source, d_sink) edits with exact reparameterization.

        A terminal link that would go negative is fixed by shifting both
        links of that vertex up by the deficit; afterwards the common part
        ``min(src, snk)`` is cancelled into the accumulated flow (it is a
        direct source->vertex->sink push).
        """
        g = self.g
        for v, d_src, d_snk in deltas:
            if not 0 <= v < g.n_vertices:
                raise ValueError(f"unknown vertex id {v}")
            g.ensure_scale(max(d_src.log2_den, d_snk.log2_den))
        for v, d_src, d_snk in deltas:
            a = g.src[v] + (d_src.num << (g.log2_den - d_src.log2_den))
            b = g.snk[v] + (d_snk.num << (g.log2_den - d_snk.log2_den))
            shift = max(0, -a, -b)
            a += shift
            b += shift
            m = min(a, b)
            g.src[v] = a - m
            g.snk[v] = b - m
            g.flow_num += m
            self._dirty.add(v)

    # -- warm-start repair ---------------------------------------------------------

    def _repair(self) -> None:
        g = self.g
        for v in sorted(self._dirty):
            m = min(g.src[v], g.snk[v])
            if m:
                g.src[v] -= m
                g.snk[v] -= m
                g.flow_num += m
            t = self.tree[v]
            if t == FREE:
                if g.src[v] > 0:
                    self.tree[v] = TREE_S
                    self.parent[v] = P_TERM
                elif g.snk[v] > 0:
                    self.tree[v] = TREE_T
                    self.parent[v] = P_TERM
            elif self.parent[v] == P_TERM:
                ok = g.src[v] > 0 if t == TREE_S else g.snk[v] > 0
                if not ok:
                    self.parent[v] = P_NONE
                    self._orphans.append(v)
            if self.tree[v] != FREE or g.src[v] > 0 or g.snk[v] > 0:
                self._activate(v)
        self._dirty.clear()
        self._adopt_orphans()

    # -- growth ------------------------------------------------------------------

    def _grow(self):
        """Find an augmenting path.

        Returns ('t', v) for s->..->v->t, ('s', v) for s->v->..->t, or
        ('b', e) for an S->T bridge edge e; None when no path remains.
        """
        g = self.g
        while True:
            v = self._pop_active()
            if v is None:
                return None
            t = self.tree[v]
            if t == FREE:
                continue
            if t == TREE_S and g.snk[v] > 0:
                self._activate(v)  # may yield more paths later
                return ("t", v)
            if t == TREE_T and g.src[v] > 0:
                self._activate(v)
                return ("s", v)
            for e in self.adj[v]:
                w = self._head(e)
                if t == TREE_S:
                    if self._rcap(e) <= 0:
                        continue
                    if self.tree[w] == FREE:
                        self.tree[w] = TREE_S
                        self.parent[w] = e ^ 1  # edge w->v
                        self._activate(w)
                    elif self.tree[w] == TREE_T:
                        self._activate(v)
                        return ("b", e)
                else:
                    if self._rcap(e ^ 1) <= 0:  # need residual w->v
                        continue
                    if self.tree[w] == FREE:
                        self.tree[w] = TREE_T
                        self.parent[w] = e ^ 1
                        self._activate(w)
                    elif self.tree[w] == TREE_S:
                        self._activate(v)
                        return ("b", e ^ 1)

    # -- augmentation -----------------------------------------------------------------

    def _chain_to_root(self, v: int) -> tuple[list[int], int]:
        """Parent-edge ids from v up to its terminal root; returns (edges, root)."""
        edges = []
        while self.parent[v] != P_TERM:
            e = self.parent[v]
            edges.append(e)
            v = self._head(e)
        return edges, v

    def _augment(self, kind: str, item: int) -> None:
        g = self.g
        if kind == "b":
            bridge = item
            u = self._head(bridge ^ 1)
            w = self._head(bridge)
            s_edges, s_root = self._chain_to_root(u)
            t_edges, t_root = self._chain_to_root(w)
            bottleneck = min(self._rcap(bridge), g.src[s_root], g.snk[t_root])
            for e in s_edges:           # S-side: flow runs parent->child = e^1
                bottleneck = min(bottleneck, self._rcap(e ^ 1))
            for e in t_edges:           # T-side: flow runs child->parent = e
                bottleneck = min(bottleneck, self._rcap(e))
            assert bottleneck > 0
            self._add_rcap(bridge, -bottleneck)
            self._add_rcap(bridge ^ 1, bottleneck)
            g.src[s_root] -= bottleneck
            g.snk[t_root] -= bottleneck
            for e in s_edges:
                self._add_rcap(e ^ 1, -bottleneck)
                self._add_rcap(e, bottleneck)
            for e in t_edges:
                self._add_rcap(e, -bottleneck)
                self._add_rcap(e ^ 1, bottleneck)
            # orphan vertices whose parent edge saturated
            for e in s_edges:
                if self._rcap(e ^ 1) == 0:
                    child = self._head(e ^ 1)
                    self.parent[child] = P_NONE
                    self._orphans.append(child)
            if g.src[s_root] == 0:
                self.parent[s_root] = P_NONE
                self._orphans.append(s_root)
            for e in t_edges:
                if self._rcap(e) == 0:
                    child = self._head(e ^ 1)
                    self.parent[child] = P_NONE
                    self._orphans.append(child)
            if g.snk[t_root] == 0:
                self.parent[t_root] = P_NONE
                self._orphans.append(t_root)
        elif kind == "t":               # s -> ... -> v -> t, v in S-tree
            v = item
            s_edges, s_root = self._chain_to_root(v)
            bottleneck = min(g.snk[v], g.src[s_root])
            for e in s_edges:
                bottleneck = min(bottleneck, self._rcap(e ^ 1))
            assert bottleneck > 0
            g.snk[v] -= bottleneck
            g.src[s_root] -= bottleneck
            for e in s_edges:
                self._add_rcap(e ^ 1, -bottleneck)
                self._add_rcap(e, bottleneck)
            for e in s_edges:
                if self._rcap(e ^ 1) == 0:
                    child = self._head(e ^ 1)
                    self.parent[child] = P_NONE
                    self._orphans.append(child)
            if g.src[s_root] == 0:
                self.parent[s_root] = P_NONE
                self._orphans.append(s_root)
        else:                           # "s": s -> v -> ... -> t, v in T-tree
            v = item
            t_edges, t_root = self._chain_to_root(v)
            bottleneck = min(g.src[v], g.snk[t_root])
            for e in t_edges:
                bottleneck = min(bottleneck, self._rcap(e))
            assert bottleneck > 0
            g.src[v] -= bottleneck
            g.snk[t_root] -= bottleneck
            for e in t_edges:
                self._add_rcap(e, -bottleneck)
                self._add_rcap(e ^ 1, bottleneck)
            for e in t_edges:
                if self._rcap(e) == 0:
                    child = self._head(e ^ 1)
                    self.parent[child] = P_NONE
                    self._orphans.append(child)
            if g.snk[t_root] == 0:
                self.parent[t_root] = P_NONE
                self._orphans.append(t_root)
        g.flow_num += bottleneck

    # -- orphan adoption ---------------------------------------------------------------

    def _rooted(self, v: int) -> bool:
        """True when v's parent chain ends at a terminal (no pending orphan)."""
        while True:
            p = self.parent[v]
            if p == P_TERM:
                return True
            if p == P_NONE:
                return False
            v = self._head(p)

    def _adopt_orphans(self) -> None:
        g = self.g
        while self._orphans:
            v = self._orphans.popleft()
            t = self.tree[v]
            if t == FREE:
                continue
            # try terminal re-attachment first, then tree neighbors in order
            if (g.src[v] > 0 if t == TREE_S else g.snk[v] > 0):
                self.parent[v] = P_TERM
                continue
            adopted = False
            for e in self.adj[v]:
                w = self._head(e)
                if self.tree[w] != t:
                    continue
                rc = self._rcap(e ^ 1) if t == TREE_S else self._rcap(e)
                if rc <= 0:
                    continue
                if self._rooted(w):
                    self.parent[v] = e
                    adopted = True
                    break
            if adopted:
                continue
            # no parent: free v, re-activate potential adopters, orphan children
            for e in self.adj[v]:
                w = self._head(e)
                if self.tree[w] != t:
                    continue
                rc = self._rcap(e ^ 1) if t == TREE_S else self._rcap(e)
                if rc > 0:
                    self._activate(w)
                if self.parent[w] == (e ^ 1):  # w's parent edge points to v
                    self.parent[w] = P_NONE
                    self._orphans.append(w)
            self.tree[v] = FREE
            self.parent[v] = P_NONE
            self._in_active[v] = 0
            # a terminal-link edit may have armed the opposite terminal link,
            # in which case v re-enters the other tree as a fresh root
            if t == TREE_S and g.snk[v] > 0:
                self.tree[v] = TREE_T
                self.parent[v] = P_TERM
                self._activate(v)
            elif t == TREE_T and g.src[v] > 0:
                self.tree[v] = TREE_S
                self.parent[v] = P_TERM
                self._activate(v)
