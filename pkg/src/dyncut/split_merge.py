"""Splitting a graph into overlapping subgraphs and merging them back.

Splitting follows the half-weight rule: quantities attached only to one
region are copied into that region's subgraph; terminal links of shared
vertices and arcs lying entirely inside a shared region are halved between
the two subgraphs (exactly, via the fixed-point scale).  Merging sums the
shared quantities back and copies the rest, and adds up the members'
accumulated flows, so a merge is an exact reparameterization of the sum of
its parts.

Regions form a chain (stripe) layout: every vertex belongs to at most two
regions and only consecutive regions overlap.  That keeps the half-weight
bookkeeping exact; deeper sharing would need 1/k weights and is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .capacity import Cap
from .graph import FlowGraph


class SeparabilityError(ValueError):
    """An arc with positive capacity crosses regions that share no subgraph."""


@dataclass(frozen=True)
class RegionSpec:
    """Chain of vertex-id regions; consecutive regions must overlap."""

    regions: tuple[frozenset[int], ...]

    @staticmethod
    def of(regions) -> "RegionSpec":
        return RegionSpec(tuple(frozenset(r) for r in regions))

    def validate(self, n_vertices: int) -> None:
        if not self.regions:
            raise ValueError("at least one region required")
        seen: dict[int, list[int]] = {}
        for k, region in enumerate(self.regions):
            if not region:
                raise ValueError(f"region {k} is empty")
            for v in region:
                if not 0 <= v < n_vertices:
                    raise ValueError(f"region {k} references unknown vertex {v}")
                seen.setdefault(v, []).append(k)
        missing = n_vertices - len(seen)
        if missing:
            raise ValueError(f"{missing} vertices not covered by any region")
        for v, ks in seen.items():
            if len(ks) > 2:
                raise ValueError(f"vertex {v} appears in {len(ks)} regions (max 2)")
            if len(ks) == 2 and ks[1] - ks[0] != 1:
                raise ValueError(f"vertex {v} shared by non-adjacent regions {ks}")
        for k in range(len(self.regions) - 1):
            if not self.regions[k] & self.regions[k + 1]:
                raise ValueError(f"regions {k} and {k + 1} do not overlap")


@dataclass(frozen=True)
class StripeMeta:
    """Grid layout info kept by stripe partitions so boundaries can move."""

    width: int
    height: int
    orientation: str                  # "vertical" (column stripes) or "horizontal"
    spans: tuple[tuple[int, int], ...]  # inclusive (first, last) line per region


@dataclass
class Overlap:
    a: int                    # lower subgraph index
    b: int                    # = a + 1 in a chain partition
    vertices: tuple[int, ...]  # shared global ids, ascending


@dataclass
class Partition:
    subgraphs: list[FlowGraph]
    l2g: list[list[int]]                 # per subgraph: local id -> global id
    g2l: list[dict[int, int]]            # per subgraph: global id -> local id
    overlaps: list[Overlap]
    split_depth: list[int]               # per global vertex: #regions containing it
    stripe_meta: StripeMeta | None = None

    @property
    def n_subgraphs(self) -> int:
        return len(self.subgraphs)

    def region_sets(self) -> list[frozenset[int]]:
        return [frozenset(ids) for ids in self.l2g]


def _owners(spec: RegionSpec, n_vertices: int) -> list[list[int]]:
    owners: list[list[int]] = [[] for _ in range(n_vertices)]
    for k, region in enumerate(spec.regions):
        for v in region:
            owners[v].append(k)
    return owners


def split(g: FlowGraph, spec: RegionSpec,
          stripe_meta: StripeMeta | None = None) -> Partition:
    """Split into overlapping subgraphs with exact half-weight sharing.

    The original graph's accumulated flow is carried by subgraph 0 (any
    distribution keeps the constants' sum intact).
    """
    spec.validate(g.n_vertices)
    owners = _owners(spec, g.n_vertices)
    n_regions = len(spec.regions)

    l2g = [sorted(region) for region in spec.regions]
    g2l = [{v: i for i, v in enumerate(ids)} for ids in l2g]
    subgraphs = [FlowGraph(len(ids)) for ids in l2g]
    for sub in subgraphs:
        sub.ensure_scale(g.log2_den + 1)  # room for exact halving

    for v in range(g.n_vertices):
        ks = owners[v]
        src, snk = g.source_cap(v), g.sink_cap(v)
        if len(ks) == 1:
            subgraphs[ks[0]].set_source_cap(g2l[ks[0]][v], src)
            subgraphs[ks[0]].set_sink_cap(g2l[ks[0]][v], snk)
        else:
            for k in ks:
                subgraphs[k].set_source_cap(g2l[k][v], src.halve())
                subgraphs[k].set_sink_cap(g2l[k][v], snk.halve())

    for u, v, fwd, rev in g.arcs():
        common = sorted(set(owners[u]) & set(owners[v]))
        if not common:
            if fwd or rev:
                raise SeparabilityError(
                    f"arc ({u}, {v}) crosses regions {owners[u]} x {owners[v]} "
                    "that share no subgraph")
            continue
        if len(common) == 1:
            k = common[0]
            subgraphs[k].add_arc(g2l[k][u], g2l[k][v], fwd, rev)
        else:
            for k in common:
                subgraphs[k].add_arc(g2l[k][u], g2l[k][v],
                                     fwd.halve(), rev.halve())

    subgraphs[0].add_accumulated_flow(g.accumulated_flow)
    for sub in subgraphs:
        sub.normalize()

    overlaps = []
    for k in range(n_regions - 1):
        shared = sorted(spec.regions[k] & spec.regions[k + 1])
        overlaps.append(Overlap(k, k + 1, tuple(shared)))
    split_depth = [len(ks) for ks in owners]
    return Partition(subgraphs, l2g, g2l, overlaps, split_depth, stripe_meta)


def merge(parts: Partition, group) -> tuple[Partition, int]:
    """Merge a contiguous group of neighboring subgraphs into one.

    Shared-vertex terminal links and shared-interior arc capacities are
    summed; everything else is copied; accumulated flows add up.  Returns the
    new partition and the index of the merged subgraph within it.
    """
    group = sorted(set(group))
    if not group:
        raise ValueError("empty merge group")
    if group != list(range(group[0], group[-1] + 1)):
        raise ValueError(f"merge group {group} is not a contiguous neighbor run")
    if group[-1] >= parts.n_subgraphs:
        raise ValueError(f"merge group {group} out of range")
    if len(group) == 1:
        return parts, group[0]

    members = [parts.subgraphs[k] for k in group]
    merged_ids = sorted(set().union(*(parts.l2g[k] for k in group)))
    m_g2l = {v: i for i, v in enumerate(merged_ids)}
    merged = FlowGraph(len(merged_ids))
    merged.ensure_scale(max(m.log2_den for m in members))

    for k, sub in zip(group, members):
        ids = parts.l2g[k]
        for local in range(sub.n_vertices):
            v = m_g2l[ids[local]]
            merged.add_source_cap(v, sub.source_cap(local))
            merged.add_sink_cap(v, sub.sink_cap(local))
        for lu, lv, fwd, rev in sub.arcs():
            merged.add_arc(m_g2l[ids[lu]], m_g2l[ids[lv]], fwd, rev)
        merged.add_accumulated_flow(sub.accumulated_flow)
    merged.normalize()

    lo, hi = group[0], group[-1]
    new_subgraphs, new_l2g, new_g2l = [], [], []
    index_map: dict[int, int] = {}
    for k in range(parts.n_subgraphs):
        if k < lo or k > hi:
            index_map[k] = len(new_subgraphs)
            new_subgraphs.append(parts.subgraphs[k])
            new_l2g.append(parts.l2g[k])
            new_g2l.append(parts.g2l[k])
        elif k == lo:
            merged_index = len(new_subgraphs)
            new_subgraphs.append(merged)
            new_l2g.append(merged_ids)
            new_g2l.append(m_g2l)
    for k in group:
        index_map[k] = merged_index

    new_overlaps = []
    for ov in parts.overlaps:
        a, b = index_map[ov.a], index_map[ov.b]
        if a == b:
            continue  # dissolved inside the merged subgraph
        new_overlaps.append(Overlap(min(a, b), max(a, b), ov.vertices))

    new_depth = list(parts.split_depth)
    for ov in parts.overlaps:
        if index_map[ov.a] == index_map[ov.b]:
            for v in ov.vertices:
                new_depth[v] -= 1

    meta = parts.stripe_meta
    if meta is not None:
        spans = list(meta.spans)
        merged_span = (spans[lo][0], spans[hi][1])
        spans[lo:hi + 1] = [merged_span]
        meta = StripeMeta(meta.width, meta.height, meta.orientation, tuple(spans))

    return (Partition(new_subgraphs, new_l2g, new_g2l, new_overlaps,
                      new_depth, meta),
            merged_index)


# -- stripe helpers -------------------------------------------------------------


def _stripe_spans(n_lines: int, n_regions: int) -> list[tuple[int, int]]:
    """Inclusive (first, last) line per region; adjacent spans share one line."""
    if n_regions < 1:
        raise ValueError("need at least one region")
    if n_lines < n_regions:
        raise ValueError(f"{n_lines} lines cannot host {n_regions} "
                         "overlapping stripes")
    bounds = [round(k * n_lines / n_regions) for k in range(n_regions + 1)]
    spans = []
    for k in range(n_regions):
        first = bounds[k]
        last = bounds[k + 1] - 1 if k < n_regions - 1 else n_lines - 1
        if k < n_regions - 1:
            last += 1  # shared boundary line forms the 1-line overlap
        spans.append((first, last))
    return spans


def grid_vertex(width: int, row: int, col: int) -> int:
    return row * width + col


def stripe_regions(width: int, height: int, spans,
                   orientation: str) -> list[frozenset[int]]:
    regions = []
    for first, last in spans:
        if orientation == "vertical":
            ids = (grid_vertex(width, r, c)
                   for r in range(height) for c in range(first, last + 1))
        elif orientation == "horizontal":
            ids = (grid_vertex(width, r, c)
                   for r in range(first, last + 1) for c in range(width))
        else:
            raise ValueError(f"unknown orientation {orientation!r}")
        regions.append(frozenset(ids))
    return regions


def stripe_spec(width: int, height: int, n_regions: int,
                orientation: str = "vertical") -> tuple[RegionSpec, StripeMeta]:
    """Equal stripes over a row-major grid with one-line overlaps."""
    n_lines = width if orientation == "vertical" else height
    spans = _stripe_spans(n_lines, n_regions)
    spec = RegionSpec.of(stripe_regions(width, height, spans, orientation))
    return spec, StripeMeta(width, height, orientation, tuple(spans))


def block_spec(n_vertices: int, n_regions: int) -> RegionSpec:
    """Contiguous vertex-id blocks with one shared vertex per boundary."""
    spans = _stripe_spans(n_vertices, n_regions)
    return RegionSpec.of(frozenset(range(first, last + 1))
                         for first, last in spans)


def split_grid(g: FlowGraph, width: int, height: int, n_regions: int,
               orientation: str = "vertical") -> Partition:
    spec, meta = stripe_spec(width, height, n_regions, orientation)
    return split(g, spec, stripe_meta=meta)


# -- boundary adjustment -----------------------------------------------------------


def boundary_band(parts: Partition, pair: int, shift: int) -> tuple[int, int]:
    """Inclusive line span swept when moving the boundary of (pair, pair+1)."""
    meta = parts.stripe_meta
    if meta is None:
        raise ValueError("boundary adjustment needs a stripe partition")
    if not 0 <= pair < parts.n_subgraphs - 1:
        raise ValueError(f"no neighboring pair at index {pair}")
    lo_first, lo_last = meta.spans[pair]
    hi_first, hi_last = meta.spans[pair + 1]
    new_a_last = lo_last + shift
    new_b_first = hi_first + shift
    if not (lo_first < new_b_first and new_a_last < hi_last):
        raise ValueError(f"shift {shift} would consume an entire subgraph")
    return min(hi_first, new_b_first), max(lo_last, new_a_last)


def adjust_transfer_bytes(parts: Partition, pair: int, shift: int) -> int:
    """Bytes that move when the boundary shifts: the donor subgraph's
    serialization prorated to the swept band (always smaller than moving
    the whole subgraph, which is what a full merge costs)."""
    from .dimacs import serialized_size
    first, last = boundary_band(parts, pair, shift)
    meta = parts.stripe_meta
    donor = pair + 1 if shift >= 0 else pair
    band_ids = stripe_regions(meta.width, meta.height, [(first, last)],
                              meta.orientation)[0]
    donor_ids = set(parts.l2g[donor])
    moved = len(band_ids & donor_ids)
    size = serialized_size(parts.subgraphs[donor])
    return -(-size * moved // len(donor_ids))


def adjust_boundary(parts: Partition, pair: int, shift: int) -> Partition:
    """Move the boundary between subgraphs ``pair`` and ``pair+1``.

    Realized as merge-then-resplit of the pair, so the global function is
    preserved exactly (up to flows already absorbed).  Only stripe partitions
    carry enough layout information to re-split.
    """
    meta = parts.stripe_meta
    boundary_band(parts, pair, shift)  # validates the pair and the shift

    merged_parts, merged_index = merge(parts, (pair, pair + 1))
    old_spans = meta.spans
    new_pair_spans = [(old_spans[pair][0], old_spans[pair][1] + shift),
                      (old_spans[pair + 1][0] + shift, old_spans[pair + 1][1])]

    merged_graph = merged_parts.subgraphs[merged_index]
    merged_l2g = merged_parts.l2g[merged_index]
    local_regions = []
    for first, last in new_pair_spans:
        global_ids = stripe_regions(meta.width, meta.height,
                                    [(first, last)], meta.orientation)[0]
        local_regions.append(frozenset(merged_parts.g2l[merged_index][v]
                                       for v in global_ids))
    sub_parts = split(merged_graph, RegionSpec.of(local_regions))

    new_subgraphs = list(merged_parts.subgraphs)
    new_l2g = list(merged_parts.l2g)
    new_g2l = list(merged_parts.g2l)
    pieces = sub_parts.subgraphs
    piece_l2g = [[merged_l2g[loc] for loc in ids] for ids in sub_parts.l2g]
    new_subgraphs[merged_index:merged_index + 1] = pieces
    new_l2g[merged_index:merged_index + 1] = piece_l2g
    new_g2l[merged_index:merged_index + 1] = [
        {v: i for i, v in enumerate(ids)} for ids in piece_l2g]

    overlaps = []
    for ov in merged_parts.overlaps:
        a = ov.a if ov.a < merged_index else ov.a + 1
        b = ov.b if ov.b <= merged_index else ov.b + 1
        overlaps.append(Overlap(a, b, ov.vertices))
    shared = sorted(set(piece_l2g[0]) & set(piece_l2g[1]))
    overlaps.append(Overlap(merged_index, merged_index + 1, tuple(shared)))
    overlaps.sort(key=lambda ov: (ov.a, ov.b))

    spans = list(old_spans)
    spans[pair:pair + 2] = new_pair_spans
    new_meta = StripeMeta(meta.width, meta.height, meta.orientation,
                          tuple(spans))

    depth = [0] * len(parts.split_depth)
    for ids in new_l2g:
        for v in ids:
            depth[v] += 1
    return Partition(new_subgraphs, new_l2g, new_g2l, overlaps, depth, new_meta)
