"""Split inner product spaces F^d = E_1 ⊕ ... ⊕ E_s and adapted subspaces.

The ambient space is always F^d with the standard inner product; blocks are
consecutive coordinate ranges.  An adapted subspace is stored as one
orthonormal frame per block.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from . import scalars as sc
from .linalg import Frame
from .scalars import Field

__all__ = [
    "SplitSpace",
    "AdaptedSubspace",
    "Stratum",
    "split_dimension",
    "sample_uniform_adapted",
    "orthocomplement",
    "restrict_space",
    "restrict_scalars",
    "join_frame",
    "strata",
    "stratum_measure_mass",
]

Stratum = tuple  # per-block dimension vector, one entry per block


@dataclass(frozen=True)
class SplitSpace:
    """Ambient dimension vector (d_1, ..., d_s) over a coefficient field."""

    field: Field
    block_dims: tuple

    def __post_init__(self):
        object.__setattr__(self, "block_dims", tuple(int(d) for d in self.block_dims))
        if len(self.block_dims) < 1 or any(d < 1 for d in self.block_dims):
            raise ValueError("need at least one block, all of positive dimension")

    @property
    def dim(self) -> int:
        return sum(self.block_dims)

    @property
    def n_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def offsets(self) -> tuple:
        out, acc = [], 0
        for d in self.block_dims:
            out.append(acc)
            acc += d
        return tuple(out)

    def block_slice(self, i: int) -> slice:
        return slice(self.offsets[i], self.offsets[i] + self.block_dims[i])

    def block_of_index(self) -> np.ndarray:
        """Block label of each ambient coordinate."""
        return np.repeat(np.arange(self.n_blocks), self.block_dims)


@dataclass(frozen=True)
class AdaptedSubspace:
    """Direct sum of one subspace per block, given by per-block frames."""

    space: SplitSpace
    block_frames: tuple

    def __post_init__(self):
        frames = tuple(np.asarray(f) for f in self.block_frames)
        object.__setattr__(self, "block_frames", frames)
        if len(frames) != self.space.n_blocks:
            raise ValueError("need one frame per block")
        for i, f in enumerate(frames):
            di = self.space.block_dims[i]
            rows = f.shape[-3] if self.space.field is Field.QUATERNION else f.shape[-2]
            if rows != di:
                raise ValueError(f"block {i} frame has {rows} rows, expected {di}")
            Frame(self.space.field, f)  # orthonormality check

    @property
    def stratum(self) -> Stratum:
        q = self.space.field is Field.QUATERNION
        return tuple(f.shape[-2 if q else -1] for f in self.block_frames)

    @property
    def dim(self) -> int:
        return sum(self.stratum)


def split_dimension(q: AdaptedSubspace) -> Stratum:
    """Per-block dimension vector of the adapted subspace."""
    return q.stratum


def strata(space: SplitSpace):
    """All possible split dimensions, in lexicographic order."""
    return [tuple(n) for n in itertools.product(*(range(d + 1) for d in space.block_dims))]


def stratum_measure_mass(space: SplitSpace, nbar: Stratum) -> int:
    """Total mass prod_i binom(d_i, n_i) of the invariant measure on the stratum."""
    return math.prod(math.comb(d, n) for d, n in zip(space.block_dims, nbar))


def sample_uniform_adapted(space: SplitSpace, nbar: Stratum,
                           rng: np.random.Generator) -> AdaptedSubspace:
    """Uniform adapted subspace of the given split dimension: independent
    Haar frames per block."""
    if len(nbar) != space.n_blocks or any(n < 0 or n > d for n, d in zip(nbar, space.block_dims)):
        raise ValueError("stratum exceeds block dimensions")
    frames = tuple(
        linalg.haar_frame(d, n, space.field, rng).matrix
        for d, n in zip(space.block_dims, nbar))
    return AdaptedSubspace(space, frames)


def _block_complement(field: Field, f: np.ndarray, d: int) -> np.ndarray:
    """Orthonormal frame of the orthocomplement of span(f) inside F^d."""
    n = f.shape[-2] if field is Field.QUATERNION else f.shape[-1]
    if n == d:
        return sc.zeros(field, (d, 0))
    if n == 0:
        return sc.eye(field, d)
    if field is Field.QUATERNION:
        comp = sc.eye(field, d) - sc.mat_mul(field, f, sc.adjoint(field, f))
        return linalg._orthonormal_range(comp, d - n)
    # null space of f^*: trailing right-singular vectors of f^T
    u, s, vh = np.linalg.svd(f, full_matrices=True)
    return np.ascontiguousarray(u[:, n:])


def orthocomplement(q: AdaptedSubspace) -> AdaptedSubspace:
    """Blockwise orthocomplement; the split dimension becomes d̄ - n̄."""
    frames = tuple(
        _block_complement(q.space.field, f, d)
        for f, d in zip(q.block_frames, q.space.block_dims))
    return AdaptedSubspace(q.space, frames)


def join_frame(q: AdaptedSubspace) -> Frame:
    """Concatenate the block frames into one ambient d x |n̄| frame."""
    space = q.space
    total = q.dim
    out = sc.zeros(space.field, (space.dim, total))
    col = 0
    for i, f in enumerate(q.block_frames):
        ni = q.stratum[i]
        rows = space.block_slice(i)
        if space.field is Field.QUATERNION:
            out[rows, col:col + ni, :] = f
        else:
            out[rows, col:col + ni] = f
        col += ni
    return Frame(space.field, out)


def restrict_space(space: SplitSpace) -> SplitSpace:
    """The split space obtained by restriction of scalars (blocks double)."""
    if space.field is Field.REAL:
        raise ValueError("real coefficients cannot be restricted further")
    lower = Field.COMPLEX if space.field is Field.QUATERNION else Field.REAL
    return SplitSpace(lower, tuple(2 * d for d in space.block_dims))


def restrict_scalars(space: SplitSpace, matrix: np.ndarray):
    """Restriction of scalars of an operator: entries become 2x2 blocks over
    the next field down, so consecutive block ranges double in place."""
    if space.field is Field.QUATERNION:
        return restrict_space(space), sc.complexify(matrix)
    if space.field is Field.COMPLEX:
        return restrict_space(space), sc.realify(matrix)
    raise ValueError("real coefficients cannot be restricted further")
