"""DIMACS max-flow text format.

Reading maps the two declared terminals onto the implicit source/sink:
arcs ``s -> i`` and ``i -> t`` become terminal links, antiparallel neighbor
arcs fold into one record, duplicate arcs sum, and a direct ``s -> t`` arc is
absorbed into the accumulated-flow constant (it crosses every cut).  Arcs
into the source or out of the sink can never carry source-to-sink flow and
are dropped.

Capacities may be integers or finite decimals; decimals must be exact binary
fixed-point values (e.g. ``2.5``, ``0.125``).  Writing emits minimal exact
decimals, plus a ``c flow <value>`` comment carrying the accumulated-flow
constant so that a written graph reads back with an identical polynomial.
Plain benchmark files (integer capacities, no comment) parse unchanged.
"""

from __future__ import annotations

import io
from fractions import Fraction

from .capacity import Cap
from .graph import FlowGraph


class DimacsError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _parse_cap(token: str, line_no: int) -> Cap:
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise DimacsError(line_no, f"bad capacity {token!r}") from None
    if value < 0:
        raise DimacsError(line_no, f"negative capacity {token!r}")
    try:
        return Cap.from_fraction(value)
    except ValueError:
        raise DimacsError(
            line_no, f"capacity {token!r} is not binary fixed-point") from None


def read_dimacs(stream) -> FlowGraph:
    if isinstance(stream, str):
        stream = io.StringIO(stream)

    n_nodes = None
    source = sink = None
    flow_constant = Cap(0)
    arcs: list[tuple[int, int, int, Cap]] = []  # (u, v, line_no, cap)

    for line_no, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        tag = fields[0]
        if tag == "c":
            if len(fields) == 3 and fields[1] == "flow":
                flow_constant = _parse_cap(fields[2], line_no)
            continue
        if tag == "p":
            if n_nodes is not None:
                raise DimacsError(line_no, "duplicate problem line")
            if len(fields) != 4 or fields[1] != "max":
                raise DimacsError(line_no, f"malformed problem line {line!r}")
            try:
                n_nodes = int(fields[2])
                int(fields[3])
            except ValueError:
                raise DimacsError(line_no, "non-integer node/arc count") from None
            if n_nodes < 2:
                raise DimacsError(line_no, "need at least the two terminals")
            continue
        if n_nodes is None:
            raise DimacsError(line_no, f"{tag!r} line before problem line")
        if tag == "n":
            if len(fields) != 3 or fields[2] not in ("s", "t"):
                raise DimacsError(line_no, f"malformed node descriptor {line!r}")
            node = _node_id(fields[1], n_nodes, line_no)
            if fields[2] == "s":
                source = node
            else:
                sink = node
            continue
        if tag == "a":
            if len(fields) != 4:
                raise DimacsError(line_no, f"malformed arc line {line!r}")
            u = _node_id(fields[1], n_nodes, line_no)
            v = _node_id(fields[2], n_nodes, line_no)
            arcs.append((u, v, line_no, _parse_cap(fields[3], line_no)))
            continue
        raise DimacsError(line_no, f"unknown line type {tag!r}")

    if n_nodes is None:
        raise DimacsError(0, "missing problem line")
    if source is None or sink is None:
        raise DimacsError(0, "source or sink never declared")
    if source == sink:
        raise DimacsError(0, "source and sink coincide")

    inner = [i for i in range(1, n_nodes + 1) if i not in (source, sink)]
    to_local = {node: k for k, node in enumerate(inner)}
    g = FlowGraph(len(inner))
    g.add_accumulated_flow(flow_constant)
    for u, v, line_no, cap in arcs:
        if u == v:
            raise DimacsError(line_no, "self-loop arc")
        if not cap:
            continue
        if u == source and v == sink:
            g.add_accumulated_flow(cap)       # crosses every cut
        elif u == source:
            g.add_source_cap(to_local[v], cap)
        elif v == sink:
            g.add_sink_cap(to_local[u], cap)
        elif v == source or u == sink:
            continue                          # cannot carry s->t flow
        else:
            g.add_arc(to_local[u], to_local[v], cap)
    return g


def _node_id(token: str, n_nodes: int, line_no: int) -> int:
    try:
        node = int(token)
    except ValueError:
        raise DimacsError(line_no, f"bad node id {token!r}") from None
    if not 1 <= node <= n_nodes:
        raise DimacsError(line_no, f"node {node} not within declared 1..{n_nodes}")
    return node


def write_dimacs(g: FlowGraph, stream=None) -> str | None:
    """Write the graph; vertex i maps to node i+2, source=1, sink=n+2."""
    out = io.StringIO() if stream is None else stream
    n = g.n_vertices
    lines: list[str] = []
    if g.accumulated_flow:
        lines.append(f"c flow {g.accumulated_flow}")
    arc_lines: list[str] = []
    for i in range(n):
        if g.src[i]:
            arc_lines.append(f"a 1 {i + 2} {g.source_cap(i)}")
        if g.snk[i]:
            arc_lines.append(f"a {i + 2} {n + 2} {g.sink_cap(i)}")
    for u, v, fwd, rev in g.arcs():
        if fwd:
            arc_lines.append(f"a {u + 2} {v + 2} {fwd}")
        if rev:
            arc_lines.append(f"a {v + 2} {u + 2} {rev}")
    lines.append(f"p max {n + 2} {len(arc_lines)}")
    lines.append("n 1 s")
    lines.append(f"n {n + 2} t")
    lines.extend(arc_lines)
    text = "\n".join(lines) + "\n"
    out.write(text)
    if stream is None:
        return text
    return None


def serialized_size(g: FlowGraph) -> int:
    """Byte size of the graph's text serialization (transport cost model)."""
    return len(write_dimacs(g).encode())
