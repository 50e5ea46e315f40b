"""Determinantal subspace processes on split inner product spaces.

A model is a split space together with a self-adjoint contraction kernel.
Sampling follows the two-stage recipe: draw a Haar-uniform orthonormal basis
of every block, conjugate the kernel into that basis, and run an exact
discrete determinantal sampler on the resulting matrix.  All samplers are
vectorised over replicas.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import dpp, extalg, linalg
from . import scalars as sc
from .dpp import Kernel
from .linalg import Frame, Operator
from .scalars import Field
from .splitspace import AdaptedSubspace, SplitSpace, Stratum, join_frame, strata

__all__ = [
    "DlpModel",
    "DlpSample",
    "TransversalityError",
    "dlp_density",
    "sample",
    "sample_many",
    "sample_strata",
    "sample_via_mixture",
    "sample_strata_via_mixture",
    "laplace_transform",
    "strata_masses",
    "strata_masses_polynomial",
    "strata_masses_from_subsets",
    "matroid_support",
    "restrict",
    "complement_model",
    "scale_model",
    "mean_projection_estimate",
    "mean_wedge_estimate",
    "sample_frames_projection",
]

TRANSVERSALITY_TOL = 1e-12


class TransversalityError(RuntimeError):
    """A projection-kernel sample failed to be a complement of H-perp."""


@dataclass(frozen=True)
class DlpModel:
    """A split space with a contraction kernel on it."""

    space: SplitSpace
    kernel: Kernel

    def __post_init__(self):
        if self.kernel.space != self.space:
            raise ValueError("kernel space does not match the model space")

    @classmethod
    def from_matrix(cls, space: SplitSpace, matrix: np.ndarray) -> "DlpModel":
        return cls(space, Kernel(space, matrix))

    @property
    def field(self) -> Field:
        return self.space.field

    @property
    def d(self) -> int:
        return self.space.dim


@dataclass(frozen=True)
class DlpSample:
    """One draw: an adapted subspace, its density, and rng provenance."""

    subspace: AdaptedSubspace
    density_value: float
    basis_seed: str | None = None


def dlp_density(model: DlpModel, q: AdaptedSubspace) -> float:
    """Probability density of the model at an adapted subspace, with respect
    to the invariant measure of total mass 2^d."""
    if q.space != model.space:
        raise ValueError("subspace is not adapted to the model space")
    k = Operator(model.field, model.kernel.matrix, hermitian=True)
    return max(linalg.schur_density(k, join_frame(q)), 0.0)


# ---------------------------------------------------------------------------
# Batched sampling machinery.
# ---------------------------------------------------------------------------

def _haar_adapted_basis_batch(space: SplitSpace, batch: int,
                              rng: np.random.Generator) -> np.ndarray:
    """Block-diagonal matrices whose blocks are independent Haar isometries."""
    field = space.field
    u = sc.zeros(field, (batch, space.dim, space.dim))
    for i, di in enumerate(space.block_dims):
        sl = space.block_slice(i)
        blk = linalg.haar_frame_batch(di, di, field, rng, batch)
        if field is Field.QUATERNION:
            u[:, sl, sl, :] = blk
        else:
            u[:, sl, sl] = blk
    return u


def _conjugate_batch(field: Field, u: np.ndarray, k: np.ndarray) -> np.ndarray:
    """U* K U for a batch of bases; k is shared or per-replica."""
    if k.ndim == (3 if field is Field.QUATERNION else 2):
        k = k[None]
    uk = sc.mat_mul(field, sc.adjoint(field, u), k)
    return sc.mat_mul(field, uk, u)


def _quaternion_tables_from_hat(k_hat: np.ndarray, d: int) -> np.ndarray:
    """Exact subset densities for a stack of complexified quaternion kernels
    (B, 2d, 2d).  Densities are nonnegative, so the Moore determinant of
    K - P_{I^c} is the positive square root of the complexified determinant;
    this is the vectorised route, enumeration being its tested cross-check."""
    b = k_hat.shape[0]
    out = np.empty((b, 1 << d))
    diag = np.arange(2 * d)
    for m in range(1 << d):
        off = np.repeat([not (m >> i) & 1 for i in range(d)], 2).astype(float)
        work = k_hat.copy()
        work[:, diag, diag] -= off
        dets = np.linalg.det(work).real
        out[:, m] = np.sqrt(np.maximum(dets, 0.0))
    return out


def _masks_to_bools(masks: np.ndarray, d: int) -> np.ndarray:
    return ((masks[:, None] >> np.arange(d)[None, :]) & 1).astype(bool)


def _sample_taken_batch(model: DlpModel, batch: int, rng: np.random.Generator,
                        kernels: np.ndarray | None = None):
    """Core sampler: returns (taken bools (B, d), bases U, densities (B,)).

    ``kernels`` optionally holds per-replica kernel matrices (used by the
    mixture sampler); by default the model kernel is shared.
    """
    field = model.field
    d = model.d
    u = _haar_adapted_basis_batch(model.space, batch, rng)
    k = model.kernel.matrix if kernels is None else kernels
    if field is Field.QUATERNION:
        if d > dpp.ENUMERATION_MAX_DIM:
            raise sc.BudgetError(
                f"quaternion sampling enumerates 2^{d} subsets; the budget is "
                f"2^{dpp.ENUMERATION_MAX_DIM}")
        # conjugate and evaluate in the complex representation throughout
        u_hat = sc.complexify(u)
        k_hat = sc.complexify(k if kernels is not None else k[None])
        k_u_hat = np.conj(np.swapaxes(u_hat, -2, -1)) @ k_hat @ u_hat
        k_u_hat = (k_u_hat + np.conj(np.swapaxes(k_u_hat, -2, -1))) / 2.0
        tables = _quaternion_tables_from_hat(k_u_hat, d)
        masks = dpp.sample_enumerated_batch_rows(tables, rng)
        taken = _masks_to_bools(masks, d)
        dens = tables[np.arange(batch), masks]
    else:
        k_u = sc.hermitize(field, _conjugate_batch(field, u, k))
        taken = dpp.sample_recursive_batch(k_u, rng)
        eye = sc.eye(field, d)
        cols = np.where(taken[:, None, :], k_u, eye[None] - k_u)
        dens = np.maximum(np.linalg.det(cols).real, 0.0)
    return taken, u, dens


def _block_indicator(space: SplitSpace) -> np.ndarray:
    ind = np.zeros((space.dim, space.n_blocks), dtype=np.int64)
    for i in range(space.n_blocks):
        ind[space.block_slice(i), i] = 1
    return ind


def _strata_counts(space: SplitSpace, taken: np.ndarray) -> np.ndarray:
    return taken.astype(np.int64) @ _block_indicator(space)


def sample_strata(model: DlpModel, n_samples: int, rng: np.random.Generator,
                  chunk: int = 20000) -> np.ndarray:
    """Split dimensions of n independent draws, shape (n, s)."""
    out = np.empty((n_samples, model.space.n_blocks), dtype=np.int64)
    for lo in range(0, n_samples, chunk):
        b = min(chunk, n_samples - lo)
        taken, _, _ = _sample_taken_batch(model, b, rng)
        out[lo:lo + b] = _strata_counts(model.space, taken)
    return out


def _subspace_from_taken(model: DlpModel, u: np.ndarray, taken: np.ndarray) -> AdaptedSubspace:
    field = model.field
    frames = []
    for i in range(model.space.n_blocks):
        sl = model.space.block_slice(i)
        block_u = u[sl, sl] if field is not Field.QUATERNION else u[sl, sl, :]
        sel = np.flatnonzero(taken[sl])
        if field is Field.QUATERNION:
            frames.append(block_u[:, sel, :])
        else:
            frames.append(block_u[:, sel])
    return AdaptedSubspace(model.space, tuple(frames))


def _rng_stamp(rng: np.random.Generator) -> str:
    return hashlib.sha256(repr(rng.bit_generator.state).encode()).hexdigest()[:16]


def sample(model: DlpModel, rng: np.random.Generator) -> DlpSample:
    """One exact draw from the model."""
    stamp = _rng_stamp(rng)
    taken, u, dens = _sample_taken_batch(model, 1, rng)
    return DlpSample(_subspace_from_taken(model, u[0], taken[0]), float(dens[0]), stamp)


def sample_many(model: DlpModel, n_samples: int, rng: np.random.Generator,
                chunk: int = 4096) -> list:
    """n independent draws, materialised with their frames."""
    out = []
    for lo in range(0, n_samples, chunk):
        b = min(chunk, n_samples - lo)
        stamp = _rng_stamp(rng)
        taken, u, dens = _sample_taken_batch(model, b, rng)
        for r in range(b):
            out.append(DlpSample(_subspace_from_taken(model, u[r], taken[r]),
                                 float(dens[r]), stamp))
    return out


# ---------------------------------------------------------------------------
# Mixture-of-projections sampler.
# ---------------------------------------------------------------------------

def _eigen_clusters(lam: np.ndarray, tol: float = 1e-8):
    clusters = []
    for i, v in enumerate(lam):
        if clusters and v - lam[clusters[-1][-1]] <= tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


def _mixture_projector_batch(model: DlpModel, batch: int,
                             rng: np.random.Generator) -> np.ndarray:
    """Per-replica random projection kernels whose mixture is the model:
    in each eigenspace of the kernel, a Haar subspace of binomial dimension."""
    field = model.field
    if field is Field.QUATERNION:
        raise ValueError("the mixture sampler uses the eigenbasis route over R and C only")
    lam, frame = linalg.hermitian_eig(Operator(field, model.kernel.matrix, hermitian=True))
    proj = sc.zeros(field, (batch, model.d, model.d))
    for idx in _eigen_clusters(lam):
        lam_c = float(np.mean(lam[idx]))
        m = len(idx)
        v = frame.matrix[:, idx]
        if lam_c <= 1e-12:
            continue
        dims = rng.binomial(m, min(lam_c, 1.0), size=batch)
        w = linalg.haar_frame_batch(m, m, field, rng, batch)
        colmask = np.arange(m)[None, :] < dims[:, None]
        wm = w * colmask[:, None, :]
        inner = wm @ np.conj(np.swapaxes(wm, -2, -1))
        proj += v @ inner @ np.conj(v.T)
    return sc.hermitize(field, proj)


def sample_via_mixture(model: DlpModel, rng: np.random.Generator) -> DlpSample:
    """One draw realised as a projection-kernel draw with a random range:
    eigenspace-wise binomial-dimension Haar subspaces, then the projection
    model onto their direct sum."""
    stamp = _rng_stamp(rng)
    proj = _mixture_projector_batch(model, 1, rng)
    taken, u, dens = _sample_taken_batch(model, 1, rng, kernels=proj)
    return DlpSample(_subspace_from_taken(model, u[0], taken[0]), float(dens[0]), stamp)


def sample_strata_via_mixture(model: DlpModel, n_samples: int, rng: np.random.Generator,
                              chunk: int = 20000) -> np.ndarray:
    out = np.empty((n_samples, model.space.n_blocks), dtype=np.int64)
    for lo in range(0, n_samples, chunk):
        b = min(chunk, n_samples - lo)
        proj = _mixture_projector_batch(model, b, rng)
        taken, _, _ = _sample_taken_batch(model, b, rng, kernels=proj)
        out[lo:lo + b] = _strata_counts(model.space, taken)
    return out


# ---------------------------------------------------------------------------
# Transforms and summaries.
# ---------------------------------------------------------------------------

def laplace_transform(model: DlpModel, t) -> float:
    """E[exp(sum_i t_i dim(Q ∩ E_i))] = det(1 + k (e^T - 1)) with T acting as
    t_i on block i; Moore-determinant form over the quaternions."""
    t = np.asarray(t, dtype=float)
    if t.shape != (model.space.n_blocks,):
        raise ValueError("need one parameter per block")
    scale = np.exp(np.repeat(t, model.space.block_dims)) - 1.0
    k = model.kernel.matrix
    field = model.field
    if field is Field.QUATERNION:
        m = sc.eye(field, model.d) + sc.scal_mul(field, scale[:, None], k)
        return float(sc.tau_det(m, field=Field.QUATERNION))
    m = sc.eye(field, model.d) + k * scale[None, :]
    return float(np.linalg.det(m).real)


def _stratum_index_of_masks(space: SplitSpace, d: int):
    """Per-bitmask block-count tuple index, in lexicographic stratum order."""
    masks = np.arange(1 << d, dtype=np.uint32)
    all_strata = strata(space)
    lookup = {nb: i for i, nb in enumerate(all_strata)}
    counts = np.zeros((1 << d, space.n_blocks), dtype=np.int64)
    for i, (off, di) in enumerate(zip(space.offsets, space.block_dims)):
        sub = (masks >> off) & ((1 << di) - 1)
        for b in range(di):
            counts[:, i] += (sub >> b) & 1
    idx = np.array([lookup[tuple(c)] for c in counts], dtype=np.int64)
    return all_strata, idx


def strata_masses(model: DlpModel) -> dict:
    """Probability of every stratum, exactly.

    Over R and C the masses are diagonal sums of the exterior-algebra density
    of states; over the quaternions they are the coefficients of the
    polynomial Laplace transform, recovered by grid interpolation.
    """
    if model.field is Field.QUATERNION:
        return strata_masses_polynomial(model)
    rho = extalg.density_operator(model.kernel)
    diag = np.real(np.diag(rho.matrix))
    all_strata, idx = _stratum_index_of_masks(model.space, model.d)
    masses = np.zeros(len(all_strata))
    np.add.at(masses, idx, diag)
    return {nb: float(max(m, 0.0)) for nb, m in zip(all_strata, masses)}


def strata_masses_polynomial(model: DlpModel) -> dict:
    """Stratum masses as coefficients of x1^n1...xs^ns in det(1 + (X-1)k),
    by evaluation on an integer grid and per-axis Vandermonde inversion."""
    space = model.space
    dims = space.block_dims
    k = model.kernel.matrix
    field = model.field
    grid_shape = tuple(d + 1 for d in dims)
    values = np.empty(grid_shape)
    for point in itertools.product(*(range(n) for n in grid_shape)):
        scale = np.repeat(np.asarray(point, dtype=float) - 1.0, dims)
        if field is Field.QUATERNION:
            m = sc.eye(field, space.dim) + sc.scal_mul(field, scale[:, None], k)
            values[point] = sc.tau_det(m, field=Field.QUATERNION)
        else:
            m = sc.eye(field, space.dim) + scale[:, None] * k
            values[point] = float(np.linalg.det(m).real)
    coeffs = values
    for axis, npts in enumerate(grid_shape):
        vand = np.vander(np.arange(npts, dtype=float), npts, increasing=True)
        moved = np.moveaxis(coeffs, axis, 0).reshape(npts, -1)
        solved = np.linalg.solve(vand, moved)
        coeffs = np.moveaxis(solved.reshape((npts,) + coeffs.shape[:axis] + coeffs.shape[axis + 1:]), 0, axis)
    return {nb: float(max(coeffs[nb], 0.0)) for nb in strata(space)}


def strata_masses_from_subsets(model: DlpModel) -> dict:
    """Independent route: group the exact subset densities of the kernel in
    the reference basis by per-block counts."""
    table = dpp.density_table(model.kernel)
    all_strata, idx = _stratum_index_of_masks(model.space, model.d)
    masses = np.zeros(len(all_strata))
    np.add.at(masses, idx, table)
    return {nb: float(m) for nb, m in zip(all_strata, masses)}


def matroid_support(space: SplitSpace, h: Frame,
                    tol: float = linalg.RANK_REL_TOL) -> set:
    """Strata of positive mass of the projection model onto span(h): those
    n̄ with |n̄| = dim h satisfying, for every set T of blocks,
    sum_{t in T} n_t >= dim(h ∩ ⊕_{t in T} E_t)."""
    n = h.n
    s = space.n_blocks
    ranks = {}
    for r in range(1, s + 1):
        for tset in itertools.combinations(range(s), r):
            cols = np.concatenate([np.arange(space.block_slice(i).start,
                                             space.block_slice(i).stop) for i in tset])
            w = sc.zeros(space.field, (space.dim, cols.size))
            if space.field is Field.QUATERNION:
                w[cols, np.arange(cols.size), 0] = 1.0
            else:
                w[cols, np.arange(cols.size)] = 1.0
            ranks[tset] = linalg.intersection_dim(h, Frame(space.field, w), tol=tol)
    out = set()
    for nb in strata(space):
        if sum(nb) != n:
            continue
        if all(sum(nb[t] for t in tset) >= r for tset, r in ranks.items()):
            out.add(nb)
    return out


def restrict(model: DlpModel, t: int) -> DlpModel:
    """Model induced on the first t blocks, with the compressed kernel."""
    if not 1 <= t <= model.space.n_blocks:
        raise ValueError("block count out of range")
    dims = model.space.block_dims[:t]
    dim_f = sum(dims)
    sub_space = SplitSpace(model.field, dims)
    m = model.kernel.matrix
    sub = m[:dim_f, :dim_f] if model.field is not Field.QUATERNION else m[:dim_f, :dim_f, :]
    return DlpModel.from_matrix(sub_space, sub)


def complement_model(model: DlpModel) -> DlpModel:
    """Model of the orthocomplement of a draw: kernel 1 - k."""
    return DlpModel(model.space, model.kernel.complement())


def scale_model(model: DlpModel, p: float) -> DlpModel:
    """Model of blockwise binomial thinning of a draw: kernel p k."""
    return DlpModel(model.space, model.kernel.scale(p))


# ---------------------------------------------------------------------------
# Mean projection estimates (projection kernels).
# ---------------------------------------------------------------------------

def _require_projection(model: DlpModel) -> int:
    rank = model.kernel.projection_rank()
    if rank is None:
        raise ValueError("this operation needs a projection kernel")
    return rank


def sample_frames_projection(model: DlpModel, n_samples: int,
                             rng: np.random.Generator, chunk: int = 20000):
    """Joined frames of draws from a projection model, shape (n, d, rank)."""
    rank = _require_projection(model)
    field = model.field
    shape = ((n_samples, model.d, rank, 4) if field is Field.QUATERNION
             else (n_samples, model.d, rank))
    out = np.empty(shape, dtype=complex if field is Field.COMPLEX else float)
    for lo in range(0, n_samples, chunk):
        b = min(chunk, n_samples - lo)
        taken, u, _ = _sample_taken_batch(model, b, rng)
        if not np.all(taken.sum(axis=1) == rank):
            raise dpp.NumericalGuardError("projection model produced a draw of wrong dimension")
        order = np.argsort(~taken, axis=1, kind="stable")[:, :rank]
        if field is Field.QUATERNION:
            out[lo:lo + b] = np.take_along_axis(u, order[:, None, :, None], axis=2)
        else:
            out[lo:lo + b] = np.take_along_axis(u, order[:, None, :], axis=2)
    return out


def _coeff_stack(field: Field, a: np.ndarray) -> np.ndarray:
    """Real-coefficient view used for entrywise error bars."""
    if field is Field.REAL:
        return a[..., None]
    if field is Field.COMPLEX:
        return np.stack([a.real, a.imag], axis=-1)
    return a


def _oblique_projectors_batch(field: Field, frames: np.ndarray, h: Frame) -> np.ndarray:
    """P = Q (H* Q)^{-1} H* for a stack of frames; raises on near-singular
    compressions, which would contradict almost-sure transversality."""
    hm = h.matrix
    if field is Field.QUATERNION:
        hq = sc.mat_mul(field, sc.adjoint(field, hm)[None], frames)
        flat = sc.complexify(hq)
        dets = np.linalg.det(flat)
        bad = np.abs(dets) <= TRANSVERSALITY_TOL
        if np.any(bad):
            raise TransversalityError(f"{int(bad.sum())} draw(s) failed transversality")
        x = np.linalg.solve(flat, np.broadcast_to(sc.complexify(sc.adjoint(field, hm)),
                                                  (frames.shape[0],) + (2 * h.n, 2 * h.d)))
        p_hat = sc.complexify(frames) @ x
        return sc.quaternion_from_complex_pairs(p_hat)
    hq = np.conj(hm.T)[None] @ frames
    dets = np.linalg.det(hq)
    bad = np.abs(dets) <= TRANSVERSALITY_TOL
    if np.any(bad):
        raise TransversalityError(f"{int(bad.sum())} draw(s) failed transversality")
    x = np.linalg.solve(hq, np.broadcast_to(np.conj(hm.T), (frames.shape[0], h.n, h.d)))
    return frames @ x


def mean_projection_estimate(space: SplitSpace, h: Frame, n_samples: int,
                             rng: np.random.Generator):
    """Monte-Carlo mean of the projector onto a draw parallel to the
    orthocomplement of span(h), with entrywise standard errors on the real
    coefficients.  Every draw must be transversal; failures raise."""
    model = DlpModel.from_matrix(space, linalg.projection(h).matrix)
    frames = sample_frames_projection(model, n_samples, rng)
    projs = _oblique_projectors_batch(space.field, frames, h)
    coeffs = _coeff_stack(space.field, projs)
    mean_c = coeffs.mean(axis=0)
    se = coeffs.std(axis=0, ddof=1) / math.sqrt(n_samples)
    if space.field is Field.REAL:
        mean = mean_c[..., 0]
    elif space.field is Field.COMPLEX:
        mean = mean_c[..., 0] + 1j * mean_c[..., 1]
    else:
        mean = mean_c
    return Operator(space.field, mean), se


def mean_wedge_estimate(space: SplitSpace, h: Frame, n_samples: int,
                        rng: np.random.Generator, chunk: int = 4000):
    """Monte-Carlo mean of the wedge extension of the oblique projector,
    entrywise over the 2^d x 2^d minor matrix (R and C only)."""
    if space.field is Field.QUATERNION:
        raise ValueError("no exterior algebra over the quaternions")
    model = DlpModel.from_matrix(space, linalg.projection(h).matrix)
    dim = 1 << space.dim
    total = np.zeros((dim, dim, 2))
    total_sq = np.zeros((dim, dim, 2))
    for lo in range(0, n_samples, chunk):
        b = min(chunk, n_samples - lo)
        frames = sample_frames_projection(model, b, rng)
        projs = _oblique_projectors_batch(space.field, frames, h)
        wedges = extalg.wedge_operator_batch(projs, space.field)
        st = _coeff_stack(Field.COMPLEX, wedges.astype(complex))
        total += st.sum(axis=0)
        total_sq += (st ** 2).sum(axis=0)
    mean_c = total / n_samples
    var = np.maximum(total_sq / n_samples - mean_c ** 2, 0.0)
    se = np.sqrt(var / n_samples) * math.sqrt(n_samples / max(n_samples - 1, 1))
    mean = mean_c[..., 0] + 1j * mean_c[..., 1]
    if space.field is Field.REAL:
        mean = mean.real
    return mean, se
