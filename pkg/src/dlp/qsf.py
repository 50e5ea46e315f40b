"""Quantum spanning forests: graphs with group-valued edge connections.

A connection of rank N puts an N x N isometry on every oriented edge.  The
twisted derivative maps vertex functions to edge functions; the projection
onto its column span is the kernel of a determinantal subspace process on
edge space, split into one N-dimensional block per edge.  The trivial rank-1
real case is the uniform spanning tree with the transfer-current kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg, process
from . import scalars as sc
from .dpp import Kernel
from .linalg import Frame
from .process import DlpModel, DlpSample
from .scalars import Field
from .splitspace import SplitSpace

__all__ = [
    "WeightedGraph",
    "Connection",
    "GROUP_FIELDS",
    "grid_graph",
    "trivial_connection",
    "sample_haar_connection",
    "twisted_derivative",
    "star_space",
    "transfer_current",
    "qsf_model",
    "sample_qsf",
    "edge_occupancy",
    "is_spanning_tree",
    "render_svg",
]

GROUP_FIELDS = {
    "orthogonal": Field.REAL,
    "unitary": Field.COMPLEX,
    "symplectic": Field.QUATERNION,
}


@dataclass(frozen=True)
class WeightedGraph:
    """Finite graph with positive edge weights; edges are ordered pairs
    (u, v) with u < v fixing the reference orientation."""

    n_vertices: int
    edges: tuple

    def __post_init__(self):
        norm = []
        for (u, v, w) in self.edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ValueError("self-loops are not allowed")
            if w <= 0:
                raise ValueError("edge weights must be positive")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError("edge endpoint out of range")
            norm.append((min(u, v), max(u, v), w))
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def connected(self) -> bool:
        parent = list(range(self.n_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v, _ in self.edges:
            parent[find(u)] = find(v)
        return len({find(x) for x in range(self.n_vertices)}) == 1


@dataclass(frozen=True)
class Connection:
    """Per-edge isometries of rank N; traversing an edge against its
    reference orientation applies the inverse."""

    field: Field
    rank: int
    matrices: tuple

    def __post_init__(self):
        mats = tuple(np.asarray(h) for h in self.matrices)
        object.__setattr__(self, "matrices", mats)
        eye = sc.eye(self.field, self.rank)
        for h in mats:
            gram = sc.mat_mul(self.field, sc.adjoint(self.field, h), h)
            if sc.max_abs(self.field, gram - eye) > 1e-9:
                raise ValueError("connection matrices must be isometries")


def grid_graph(width: int, height: int):
    """Grid graph with unit weights; returns (graph, layout) with vertex
    (r, c) numbered r * width + c and placed at (c, r)."""
    edges = []
    for r in range(height):
        for c in range(width):
            v = r * width + c
            if c + 1 < width:
                edges.append((v, v + 1, 1.0))
            if r + 1 < height:
                edges.append((v, v + width, 1.0))
    layout = {r * width + c: (float(c), float(r)) for r in range(height) for c in range(width)}
    return WeightedGraph(width * height, tuple(edges)), layout


def complete_graph(n: int, weight: float = 1.0) -> WeightedGraph:
    return WeightedGraph(n, tuple((u, v, weight) for u in range(n) for v in range(u + 1, n)))


def trivial_connection(g: WeightedGraph, rank: int, field: Field = Field.REAL) -> Connection:
    return Connection(field, rank, tuple(sc.eye(field, rank) for _ in g.edges))


def sample_haar_connection(g: WeightedGraph, group: str, rank: int,
                           rng: np.random.Generator) -> Connection:
    """Independent Haar isometries on every edge."""
    if group not in GROUP_FIELDS:
        raise ValueError(f"group must be one of {sorted(GROUP_FIELDS)}")
    field = GROUP_FIELDS[group]
    return Connection(field, rank,
                      tuple(linalg.haar_unitary(rank, field, rng) for _ in g.edges))


def twisted_derivative(g: WeightedGraph, h: Connection) -> np.ndarray:
    """Block matrix from vertex space F^{N|V|} to edge space F^{N|E|}: the
    row block of edge e = (u -> v) is sqrt(w_e) (h_e f(v) - f(u))."""
    n = h.rank
    field = h.field
    d = sc.zeros(field, (n * g.n_edges, n * g.n_vertices))
    eye = sc.eye(field, n)
    for e, (u, v, w) in enumerate(g.edges):
        rows = slice(n * e, n * (e + 1))
        sw = math.sqrt(w)
        if field is Field.QUATERNION:
            d[rows, n * u:n * (u + 1), :] = -sw * eye
            d[rows, n * v:n * (v + 1), :] = sw * h.matrices[e]
        else:
            d[rows, n * u:n * (u + 1)] = -sw * eye
            d[rows, n * v:n * (v + 1)] = sw * h.matrices[e]
    return d


def star_space(g: WeightedGraph, h: Connection, rank: int | None = None) -> Frame:
    """Orthonormal frame of the column span of the twisted derivative inside
    edge space.  For the trivial connection on a connected graph the span has
    dimension N(|V| - 1)."""
    if rank is not None and rank != h.rank:
        raise ValueError("rank disagrees with the connection")
    d = twisted_derivative(g, h)
    field = h.field
    r = sc.rank(field, d)
    if field is Field.QUATERNION:
        return Frame(field, linalg._orthonormal_range(d, r))
    u, s, _ = np.linalg.svd(d, full_matrices=False)
    return Frame(field, np.ascontiguousarray(u[:, :r]))


def transfer_current(g: WeightedGraph) -> Kernel:
    """Transfer-current kernel on edge space (rank 1, trivial connection):
    K = d (d* d)^+ d*, the orthogonal projection onto the span of the
    derivative; its diagonal holds the spanning-tree edge probabilities."""
    if not g.connected:
        raise ValueError("transfer current needs a connected graph")
    d = twisted_derivative(g, trivial_connection(g, 1))
    lap = d.T @ d
    k = d @ np.linalg.pinv(lap, rcond=1e-10) @ d.T
    space = SplitSpace(Field.REAL, (1,) * g.n_edges)
    return Kernel(space, sc.hermitize(Field.REAL, k))


def qsf_model(g: WeightedGraph, h: Connection) -> DlpModel:
    """Determinantal model of the quantum spanning forest: edge space split
    into per-edge blocks of dimension N, kernel the projection onto the
    twisted star space."""
    if not g.connected:
        raise ValueError("quantum spanning forests need a connected graph")
    star = star_space(g, h)
    space = SplitSpace(h.field, (h.rank,) * g.n_edges)
    return DlpModel(space, Kernel(space, linalg.projection(star).matrix))


def sample_qsf(g: WeightedGraph, h: Connection, rng: np.random.Generator) -> DlpSample:
    return process.sample(qsf_model(g, h), rng)


def edge_occupancy(sample: DlpSample) -> tuple:
    """Occupied dimension (0..N) of every edge block."""
    return sample.subspace.stratum


def is_spanning_tree(g: WeightedGraph, occupied) -> bool:
    """Union-find check that the occupied edges form a spanning tree."""
    chosen = [e for e, occ in enumerate(occupied) if occ]
    if len(chosen) != g.n_vertices - 1:
        return False
    parent = list(range(g.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in chosen:
        u, v, _ = g.edges[e]
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


# ---------------------------------------------------------------------------
# Rendering.
# ---------------------------------------------------------------------------

def _gray(level: float) -> str:
    c = int(round(230 * (1.0 - level)))
    return f"#{c:02x}{c:02x}{c:02x}"


def render_svg(g: WeightedGraph, sample, layout: dict) -> str:
    """Deterministic SVG 1.1 picture of a forest sample: stroke weight and
    darkness encode the occupied dimension of each edge, with a legend of
    N + 1 levels.  ``sample`` is a DlpSample or a per-edge occupancy tuple."""
    if layout is None:
        raise ValueError("a 2D layout is required")
    occ = edge_occupancy(sample) if isinstance(sample, DlpSample) else tuple(sample)
    if len(occ) != g.n_edges:
        raise ValueError("occupancy length does not match the edge count")
    rank = max([1] + list(occ))
    if isinstance(sample, DlpSample):
        rank = max(rank, sample.subspace.space.block_dims[0])

    xs = [layout[v][0] for v in range(g.n_vertices)]
    ys = [layout[v][1] for v in range(g.n_vertices)]
    span_x = max(xs) - min(xs) or 1.0
    span_y = max(ys) - min(ys) or 1.0
    margin, size = 30.0, 480.0
    scale = size / max(span_x, span_y)

    def pos(v):
        x, y = layout[v]
        return (margin + (x - min(xs)) * scale, margin + (y - min(ys)) * scale)

    w = margin * 2 + span_x * scale
    h = margin * 2 + span_y * scale + 40.0
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{w:.1f}" height="{h:.1f}" viewBox="0 0 {w:.1f} {h:.1f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for e, (u, v, _) in enumerate(g.edges):
        (x1, y1), (x2, y2) = pos(u), pos(v)
        level = occ[e] / rank
        width = 0.6 + 3.4 * level
        lines.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{_gray(level)}" stroke-width="{width:.2f}"/>')
    for v in range(g.n_vertices):
        x, y = pos(v)
        lines.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2.20" fill="#303030"/>')
    # legend: one swatch per occupancy level
    ly = h - 22.0
    lines.append(f'<text x="{margin:.1f}" y="{ly - 8.0:.1f}" font-size="11" '
                 f'font-family="sans-serif">occupied dimension</text>')
    for lev in range(rank + 1):
        x0 = margin + lev * 64.0
        level = lev / rank
        lines.append(
            f'<line x1="{x0:.2f}" y1="{ly:.2f}" x2="{x0 + 28.0:.2f}" y2="{ly:.2f}" '
            f'stroke="{_gray(level)}" stroke-width="{0.6 + 3.4 * level:.2f}"/>')
        lines.append(
            f'<text x="{x0 + 33.0:.2f}" y="{ly + 4.0:.2f}" font-size="11" '
            f'font-family="sans-serif">{lev}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
