"""Exact small-dimension oracle on the exterior algebra of F^d (R and C).

The 2^d-dimensional exterior algebra is coordinatised by the subset basis
{e_I}, I a bitmask over the d ground indices, with e_I the wedge of the
selected basis vectors in ascending order.  Operators are dense 2^d x 2^d
matrices indexed by bitmask.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dpp import Kernel
from .scalars import BudgetError, Field
from .splitspace import AdaptedSubspace, SplitSpace, Stratum, join_frame
from .linalg import Frame, Operator, hermitian_eig

__all__ = [
    "ExteriorOperator",
    "ExteriorVector",
    "EXTALG_MAX_DIM",
    "wedge_operator",
    "wedge_operator_batch",
    "plucker",
    "hodge_sign",
    "hodge_signs",
    "adjugate",
    "density_operator",
    "strata_projector",
    "dlp_prob_trace",
]

EXTALG_MAX_DIM = 14


def _check_budget(d: int):
    if d > EXTALG_MAX_DIM:
        raise BudgetError(f"exterior algebra of dimension 2^{d} exceeds the d <= {EXTALG_MAX_DIM} budget")
    if d < 0:
        raise ValueError("negative dimension")


def _check_field(field: Field):
    if field is Field.QUATERNION:
        raise ValueError("no exterior algebra is implemented over the quaternions")


@dataclass(frozen=True)
class ExteriorOperator:
    """Endomorphism of the exterior algebra on the subset basis."""

    field: Field
    d: int
    matrix: np.ndarray

    def __post_init__(self):
        _check_field(self.field)
        m = np.asarray(self.matrix)
        if m.shape != (1 << self.d, 1 << self.d):
            raise ValueError("matrix must be 2^d x 2^d")
        object.__setattr__(self, "matrix", m)

    def compose(self, other: "ExteriorOperator") -> "ExteriorOperator":
        return ExteriorOperator(self.field, self.d, self.matrix @ other.matrix)


@dataclass(frozen=True)
class ExteriorVector:
    """Vector of the exterior algebra on the subset basis."""

    field: Field
    d: int
    coords: np.ndarray

    def __post_init__(self):
        _check_field(self.field)
        c = np.asarray(self.coords)
        if c.shape != (1 << self.d,):
            raise ValueError("coordinates must have length 2^d")
        object.__setattr__(self, "coords", c)


@lru_cache(maxsize=None)
def _subsets_by_size(d: int):
    """For each k, the bitmasks of the k-subsets and their sorted index lists."""
    masks = [[] for _ in range(d + 1)]
    idx = [[] for _ in range(d + 1)]
    for k in range(d + 1):
        for comb in itertools.combinations(range(d), k):
            masks[k].append(sum(1 << i for i in comb))
            idx[k].append(comb)
    return ([np.array(m, dtype=np.int64) for m in masks],
            [np.array(i, dtype=np.int64).reshape(len(i), k) for k, i in enumerate(idx)])


def wedge_operator(a: Operator) -> ExteriorOperator:
    """Functorial extension of a to the exterior algebra: the (I, J) entry is
    the minor det(a^I_J) for |I| = |J|, zero between different degrees.
    Multiplicative, with trace det(1 + a)."""
    _check_field(a.field)
    _check_budget(a.d)
    return ExteriorOperator(a.field, a.d, wedge_operator_batch(a.matrix[None], a.field)[0])


def wedge_operator_batch(stack: np.ndarray, field: Field) -> np.ndarray:
    """Wedge matrices for a stack (B, d, d); returns (B, 2^d, 2^d)."""
    _check_field(field)
    b, d = stack.shape[0], stack.shape[-1]
    _check_budget(d)
    out = np.zeros((b, 1 << d, 1 << d), dtype=stack.dtype)
    masks, idx = _subsets_by_size(d)
    out[:, 0, 0] = 1.0
    for k in range(1, d + 1):
        rows, cols = idx[k], idx[k]
        sub = stack[:, rows[:, None, :, None], cols[None, :, None, :]]
        dets = np.linalg.det(sub)
        out[:, masks[k][:, None], masks[k][None, :]] = dets
    return out


def plucker(f: Frame) -> ExteriorVector:
    """Unit wedge of the frame columns: coordinates on size-n subsets are the
    n x n minors of the frame matrix."""
    _check_field(f.field)
    _check_budget(f.d)
    masks, idx = _subsets_by_size(f.d)
    n = f.n
    coords = np.zeros(1 << f.d, dtype=f.matrix.dtype)
    if n == 0:
        coords[0] = 1.0
    else:
        sub = f.matrix[idx[n]]
        coords[masks[n]] = np.linalg.det(sub)
    return ExteriorVector(f.field, f.d, coords)


def hodge_sign(mask: int) -> int:
    """Sign (-1)^{k(k+1)/2 + sum of 1-based indices} relating e_I to its
    complementary coordinate under the Hodge star."""
    k = bin(mask).count("1")
    s = sum(i + 1 for i in range(mask.bit_length()) if (mask >> i) & 1)
    return -1 if (k * (k + 1) // 2 + s) % 2 else 1


@lru_cache(maxsize=None)
def hodge_signs(d: int) -> np.ndarray:
    return np.array([hodge_sign(m) for m in range(1 << d)], dtype=np.int64)


def adjugate(f: ExteriorOperator) -> ExteriorOperator:
    """Adjugate endomorphism: entry (I, J) is (-1)^I (-1)^J times the
    (J^c, I^c) entry of f.  Antimorphism of composition; on wedge operators,
    adj(∧a) ∘ ∧a = det(a) id and Tr(adj(∧a) ∧b) = det(a + b)."""
    d = f.d
    signs = hodge_signs(d)
    comp = (1 << d) - 1 - np.arange(1 << d)
    m = f.matrix[np.ix_(comp, comp)].T
    return ExteriorOperator(f.field, d, signs[:, None] * signs[None, :] * m)


def density_operator(kernel: Kernel, method: str = "auto") -> ExteriorOperator:
    """Density of states of a contraction k on the exterior algebra:
    rho_k = adj(∧(1-k)) ∘ ∧k.  Hermitian, nonnegative, unit trace; in the
    eigenbasis of k it is diagonal with entries prod_{i in I} lam_i
    prod_{i not in I} (1 - lam_i); for a projection onto H it is the
    orthogonal projection onto the Plücker line of H."""
    field = kernel.field
    _check_field(field)
    d = kernel.d
    _check_budget(d)
    if method not in ("auto", "adjugate", "eigen"):
        raise ValueError("method must be auto, adjugate or eigen")
    if method == "auto":
        lam = kernel.eigenvalues
        method = "eigen" if lam.size and lam[-1] >= 1.0 - 1e-10 else "adjugate"
    if method == "adjugate":
        eye = np.eye(d, dtype=kernel.matrix.dtype)
        rho = adjugate(wedge_operator(Operator(field, eye - kernel.matrix))).matrix
        rho = rho @ wedge_operator(Operator(field, kernel.matrix)).matrix
    else:
        lam, frame = hermitian_eig(Operator(field, kernel.matrix, hermitian=True))
        masks = np.arange(1 << d)
        sel = ((masks[:, None] >> np.arange(d)[None, :]) & 1).astype(bool)
        diag = np.prod(np.where(sel, lam[None, :], 1.0 - lam[None, :]), axis=1)
        wu = wedge_operator(Operator(field, frame.matrix)).matrix
        rho = (wu * diag[None, :]) @ wu.conj().T
    rho = (rho + rho.conj().T) / 2.0
    return ExteriorOperator(field, d, rho)


def strata_projector(space: SplitSpace, nbar: Stratum) -> ExteriorOperator:
    """Diagonal orthogonal projection onto the span of the e_I whose
    per-block index counts equal the given split dimension."""
    _check_field(space.field)
    d = space.dim
    _check_budget(d)
    masks = np.arange(1 << d, dtype=np.uint32)
    keep = np.ones(1 << d, dtype=bool)
    for i, (off, di) in enumerate(zip(space.offsets, space.block_dims)):
        sub = (masks >> off) & ((1 << di) - 1)
        counts = np.zeros(1 << d, dtype=np.int64)
        for b in range(di):
            counts += (sub >> b) & 1
        keep &= counts == nbar[i]
    diag = keep.astype(float)
    return ExteriorOperator(space.field, d, np.diag(diag))


def dlp_prob_trace(kernel: Kernel, q: AdaptedSubspace) -> float:
    """Density of the determinantal subspace process at q, evaluated as the
    trace pairing <omega_q, rho_k omega_q> on the exterior algebra."""
    rho = density_operator(kernel)
    omega = plucker(join_frame(q)).coords
    return float(np.real(np.conj(omega) @ (rho.matrix @ omega)))
