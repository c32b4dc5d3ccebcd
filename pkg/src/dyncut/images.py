"""Grayscale grid images, PGM reading and the two segmentation graph builders.

Both builders place one vertex per pixel on a 4-neighbor grid and weight
neighbor links with a contrast-sensitive Gaussian of the intensity
difference, quantized onto the shared fixed-point scale:

    w(p, q) = scale * exp(-(I_p - I_q)^2 / (2 sigma^2))

``build_seg1`` ties only the leftmost column to the source and the rightmost
to the sink (boundary-seeded segmentation); the terminal capacity is one unit
above the total neighbor-link mass, so terminals never bottleneck.
``build_seg2`` ties every pixel to both terminals with weights proportional
to the pixel value (bright pixels pull toward the sink side).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .capacity import Cap, cap_sum
from .graph import FlowGraph
from .split_merge import grid_vertex

DEFAULT_SIGMA = 10.0
DEFAULT_PRECISION_BITS = 8


@dataclass(frozen=True)
class GridImage:
    width: int
    height: int
    intensity: tuple[tuple[int, ...], ...]  # [row][col], values in 0..255

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image must have at least one pixel")
        if len(self.intensity) != self.height or any(
                len(row) != self.width for row in self.intensity):
            raise ValueError("intensity grid does not match width x height")
        for row in self.intensity:
            for v in row:
                if not 0 <= v <= 255:
                    raise ValueError(f"intensity {v} outside 0..255")

    @staticmethod
    def of(rows) -> "GridImage":
        rows = tuple(tuple(int(v) for v in row) for row in rows)
        return GridImage(len(rows[0]), len(rows), rows)

    @property
    def n_pixels(self) -> int:
        return self.width * self.height


def read_pgm(path) -> GridImage:
    """Read a P2 (ASCII) or P5 (binary) PGM file with maxval <= 255."""
    with open(path, "rb") as fh:
        data = fh.read()

    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4 and pos < len(data):
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    if len(tokens) < 4:
        raise ValueError(f"{path}: truncated PGM header")
    magic, w_s, h_s, maxval_s = tokens
    try:
        width, height, maxval = int(w_s), int(h_s), int(maxval_s)
    except ValueError as exc:
        raise ValueError(f"{path}: malformed PGM header") from exc
    if maxval > 255:
        raise ValueError(f"{path}: only maxval <= 255 supported, got {maxval}")

    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        pixels = list(data[pos:pos + width * height])
    elif magic == b"P2":
        pixels = [int(t) for t in data[pos:].split()]
    else:
        raise ValueError(f"{path}: not a PGM file (magic {magic!r})")
    if len(pixels) < width * height:
        raise ValueError(f"{path}: pixel data truncated")
    rows = [pixels[r * width:(r + 1) * width] for r in range(height)]
    return GridImage.of(rows)


def _quantize(value: Fraction | float, precision_bits: int) -> Cap:
    scale = 1 << precision_bits
    if isinstance(value, Fraction):
        num = round(value * scale)
    else:
        num = round(value * scale)
    return Cap(int(num), precision_bits)


def _contrast_weight(diff: int, scale: Fraction, sigma: float,
                     precision_bits: int) -> Cap:
    w = float(scale) * math.exp(-(diff * diff) / (2.0 * sigma * sigma))
    return _quantize(w, precision_bits)


def _grid_neighbor_links(g: FlowGraph, img: GridImage, scale: Fraction,
                         sigma: float, precision_bits: int) -> Cap:
    total = Cap(0)
    for r in range(img.height):
        for c in range(img.width):
            here = img.intensity[r][c]
            if c + 1 < img.width:
                w = _contrast_weight(here - img.intensity[r][c + 1],
                                     scale, sigma, precision_bits)
                if w:
                    g.add_arc(grid_vertex(img.width, r, c),
                              grid_vertex(img.width, r, c + 1), w, w)
                    total = total + w + w
            if r + 1 < img.height:
                w = _contrast_weight(here - img.intensity[r + 1][c],
                                     scale, sigma, precision_bits)
                if w:
                    g.add_arc(grid_vertex(img.width, r, c),
                              grid_vertex(img.width, r + 1, c), w, w)
                    total = total + w + w
    return total


def build_seg1(img: GridImage, edge_scale=Fraction(1),
               sigma: float = DEFAULT_SIGMA,
               precision_bits: int = DEFAULT_PRECISION_BITS) -> FlowGraph:
    """Boundary-seeded grid: left column to source, right column to sink."""
    edge_scale = Fraction(edge_scale)
    if edge_scale <= 0:
        raise ValueError("edge_scale must be positive")
    if img.width < 2:
        raise ValueError("seg1 needs width >= 2 for distinct terminal columns")
    g = FlowGraph(img.n_pixels)
    total = _grid_neighbor_links(g, img, edge_scale, sigma, precision_bits)
    large = total + Cap(1)
    for r in range(img.height):
        g.set_source_cap(grid_vertex(img.width, r, 0), large)
        g.set_sink_cap(grid_vertex(img.width, r, img.width - 1), large)
    return g


def build_seg2(img: GridImage, unary_scale=Fraction(1),
               pairwise_scale=Fraction(1), sigma: float = DEFAULT_SIGMA,
               precision_bits: int = DEFAULT_PRECISION_BITS) -> FlowGraph:
    """Per-pixel terminal ties: source ~ (255 - I)/255, sink ~ I/255."""
    unary_scale = Fraction(unary_scale)
    pairwise_scale = Fraction(pairwise_scale)
    if unary_scale <= 0 or pairwise_scale <= 0:
        raise ValueError("scales must be positive")
    g = FlowGraph(img.n_pixels)
    _grid_neighbor_links(g, img, pairwise_scale, sigma, precision_bits)
    for r in range(img.height):
        for c in range(img.width):
            v = grid_vertex(img.width, r, c)
            i = img.intensity[r][c]
            g.set_source_cap(v, _quantize(unary_scale * (255 - i) / 255,
                                          precision_bits))
            g.set_sink_cap(v, _quantize(unary_scale * i / 255,
                                        precision_bits))
    return g


# -- synthetic inputs ------------------------------------------------------------


def gen_synthetic(kind: str, width: int, height: int, seed: int) -> GridImage:
    """Deterministic synthetic images.

    ``seg1_worst``: a smooth horizontal gradient (every row monotone in
    intensity), the layout for which every source-to-sink path crosses every
    vertical stripe boundary.  ``seg2_random``: uniform random intensities.
    """
    if width < 1 or height < 1:
        raise ValueError("dimensions must be >= 1")
    rng = np.random.default_rng(seed)
    if kind == "seg1_worst":
        base = [round(255 * c / max(width - 1, 1)) for c in range(width)]
        row_offset = rng.integers(0, 4, size=height)
        rows = [[min(255, base[c] + int(row_offset[r])) for c in range(width)]
                for r in range(height)]
        return GridImage.of(rows)
    if kind == "seg2_random":
        pix = rng.integers(0, 256, size=(height, width))
        return GridImage.of(pix.tolist())
    raise ValueError(f"unknown synthetic kind {kind!r}")
