"""JSON encodings of scalars, matrices, models, samples and graphs.

Scalars encode as: real -> number, complex -> [re, im],
quaternion -> [a, b, c, d].
"""

from __future__ import annotations

import json
import re

import numpy as np

from .dpp import Kernel
from .process import DlpModel, DlpSample
from .qsf import Connection, WeightedGraph, grid_graph
from .scalars import Field
from .splitspace import AdaptedSubspace, SplitSpace

__all__ = [
    "mask_to_indices",
    "indices_to_mask",
    "encode_matrix",
    "decode_matrix",
    "space_to_json",
    "space_from_json",
    "kernel_to_json",
    "kernel_from_json",
    "model_to_json",
    "model_from_json",
    "sample_to_json",
    "subspace_from_json",
    "graph_to_json",
    "graph_from_json",
    "connection_to_json",
    "connection_from_json",
    "parse_graph_spec",
]


def mask_to_indices(mask: int) -> list:
    """Bitmask subset -> sorted 0-based index array (the JSON-lines form of
    a discrete sample)."""
    return [i for i in range(int(mask).bit_length()) if (mask >> i) & 1]


def indices_to_mask(indices) -> int:
    return sum(1 << int(i) for i in set(indices))


def _encode_scalar(field: Field, v):
    if field is Field.REAL:
        return float(v)
    if field is Field.COMPLEX:
        return [float(v.real), float(v.imag)]
    return [float(x) for x in v]


def encode_matrix(field: Field, m: np.ndarray):
    m = np.asarray(m)
    rows, cols = (m.shape[0], m.shape[1])
    return [[_encode_scalar(field, m[i, j]) for j in range(cols)] for i in range(rows)]


def decode_matrix(field: Field, data) -> np.ndarray:
    rows = len(data)
    cols = len(data[0]) if rows else 0
    if field is Field.REAL:
        return np.array(data, dtype=float).reshape(rows, cols)
    if field is Field.COMPLEX:
        arr = np.array(data, dtype=float).reshape(rows, cols, 2)
        return arr[..., 0] + 1j * arr[..., 1]
    return np.array(data, dtype=float).reshape(rows, cols, 4)


def space_to_json(space: SplitSpace) -> dict:
    return {"field": space.field.value, "blocks": list(space.block_dims)}


def space_from_json(data: dict) -> SplitSpace:
    return SplitSpace(Field(data["field"]), tuple(data["blocks"]))


def kernel_to_json(kernel: Kernel) -> dict:
    return {
        "field": kernel.field.value,
        "blocks": list(kernel.space.block_dims),
        "matrix": encode_matrix(kernel.field, kernel.matrix),
    }


def kernel_from_json(data: dict) -> Kernel:
    space = SplitSpace(Field(data["field"]), tuple(data["blocks"]))
    return Kernel(space, decode_matrix(space.field, data["matrix"]))


def model_to_json(model: DlpModel) -> dict:
    return {
        "space": space_to_json(model.space),
        "kernel": encode_matrix(model.field, model.kernel.matrix),
    }


def model_from_json(data: dict) -> DlpModel:
    space = space_from_json(data["space"])
    return DlpModel.from_matrix(space, decode_matrix(space.field, data["kernel"]))


def _encode_frame(field: Field, f: np.ndarray):
    cols = f.shape[1]
    return [[_encode_scalar(field, f[i, j]) for j in range(cols)] for i in range(f.shape[0])]


def sample_to_json(sample: DlpSample) -> dict:
    space = sample.subspace.space
    return {
        "stratum": list(sample.subspace.stratum),
        "block_frames": [_encode_frame(space.field, f) for f in sample.subspace.block_frames],
        "density": sample.density_value,
    }


def subspace_from_json(space: SplitSpace, frames) -> AdaptedSubspace:
    decoded = []
    for i, rows in enumerate(frames):
        if rows and rows[0]:
            decoded.append(decode_matrix(space.field, rows))
        else:
            shape = (space.block_dims[i], 0)
            decoded.append(np.zeros(shape + (4,)) if space.field is Field.QUATERNION
                           else np.zeros(shape, dtype=complex if space.field is Field.COMPLEX else float))
    return AdaptedSubspace(space, tuple(decoded))


def graph_to_json(g: WeightedGraph) -> dict:
    return {"vertices": g.n_vertices, "edges": [[u, v, w] for u, v, w in g.edges]}


def graph_from_json(data: dict) -> WeightedGraph:
    return WeightedGraph(int(data["vertices"]),
                         tuple((int(u), int(v), float(w)) for u, v, w in data["edges"]))


def connection_to_json(h: Connection) -> dict:
    return {
        "field": h.field.value,
        "rank": h.rank,
        "matrices": [encode_matrix(h.field, m) for m in h.matrices],
    }


def connection_from_json(data: dict) -> Connection:
    field = Field(data["field"])
    return Connection(field, int(data["rank"]),
                      tuple(decode_matrix(field, m) for m in data["matrices"]))


def parse_graph_spec(spec: str):
    """A graph argument is either 'grid:WxH' or a path to a graph JSON file.
    Returns (graph, layout or None)."""
    m = re.fullmatch(r"grid:(\d+)x(\d+)", spec)
    if m:
        return grid_graph(int(m.group(1)), int(m.group(2)))
    with open(spec, encoding="utf-8") as fh:
        data = json.load(fh)
    layout = None
    if "layout" in data:
        layout = {int(k): tuple(map(float, v)) for k, v in data["layout"].items()}
    return graph_from_json(data), layout
