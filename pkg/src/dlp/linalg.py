"""Frames, projections, compressions, Haar sampling, angles and
eigendecompositions over the three coefficient algebras."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import scalars as sc
from .scalars import Field

__all__ = [
    "Frame",
    "Operator",
    "RankDeficiencyError",
    "SingularityError",
    "NumericalError",
    "gram_schmidt",
    "haar_frame",
    "haar_unitary",
    "projection",
    "compress",
    "cos2",
    "hermitian_eig",
    "oblique_projector",
    "intersection_dim",
    "schur_density",
]

FRAME_TOL = 1e-10
RANK_REL_TOL = 1e-8

# Moore-determinant enumeration is factorial; above this size quaternion
# densities switch to the complexified square-root route (equal values,
# valid because contraction densities are nonnegative).
QDET_ENUM_DIM = 8


class RankDeficiencyError(ValueError):
    pass


class SingularityError(ValueError):
    pass


class NumericalError(RuntimeError):
    pass


def _matrix_dims(field: Field, m: np.ndarray) -> tuple[int, int]:
    return (m.shape[-3], m.shape[-2]) if field is Field.QUATERNION else (m.shape[-2], m.shape[-1])


@dataclass(frozen=True)
class Frame:
    """Matrix with orthonormal columns, spanning a subspace of F^d."""

    field: Field
    matrix: np.ndarray
    validate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix))
        if self.validate:
            gram = sc.mat_mul(self.field, sc.adjoint(self.field, self.matrix), self.matrix)
            err = sc.max_abs(self.field, gram - sc.eye(self.field, self.n))
            if err > FRAME_TOL:
                raise ValueError(f"columns are not orthonormal (defect {err:.2e})")

    @property
    def d(self) -> int:
        return _matrix_dims(self.field, self.matrix)[0]

    @property
    def n(self) -> int:
        return _matrix_dims(self.field, self.matrix)[1]


@dataclass(frozen=True)
class Operator:
    """Square matrix acting on F^d, optionally checked Hermitian."""

    field: Field
    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix))
        if not np.all(np.isfinite(sc.abs2(self.field, self.matrix))):
            raise ValueError("operator entries must be finite")
        if self.hermitian and not sc.is_hermitian(self.field, self.matrix):
            raise sc.HermitianError("operator is not self-adjoint")

    @property
    def d(self) -> int:
        return _matrix_dims(self.field, self.matrix)[0]


# ---------------------------------------------------------------------------
# Orthonormalisation and Haar measure.
# ---------------------------------------------------------------------------

def _gram_schmidt_raw(field: Field, raw: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with a second reorthogonalisation pass.

    Returns the orthonormalisation with positive real diagonal in the
    triangular factor, which is what makes Gaussian input Haar distributed.
    """
    if field in (Field.REAL, Field.COMPLEX):
        if raw.shape[-1] == 0:
            return raw.copy()
        q, r = np.linalg.qr(raw)
        diag = np.diagonal(r, axis1=-2, axis2=-1).copy()
        small = np.abs(diag) < 1e-300
        diag[small] = 1.0
        phase = diag / np.abs(diag)
        return q * np.conj(phase)[..., None, :]

    cols = [raw[..., j, :] for j in range(raw.shape[-2])]
    out = []
    for v in cols:
        for _ in range(2):
            for q in out:
                coeff = np.sum(sc.quat_mul(sc.quat_conj(q), v), axis=-2, keepdims=True)
                v = v - sc.quat_mul(q, np.broadcast_to(coeff, q.shape))
        norm = np.sqrt(np.sum(v * v, axis=(-2, -1), keepdims=True))
        out.append(v / norm)
    return np.stack(out, axis=-3).swapaxes(-3, -2) if out else raw.copy()


def gram_schmidt(field: Field, raw: np.ndarray) -> Frame:
    """Orthonormalise linearly independent columns, preserving their span."""
    raw = np.asarray(raw)
    m, n = _matrix_dims(field, raw)
    if n > 0:
        flat = sc.complexify(raw) if field is Field.QUATERNION else raw
        s = np.linalg.svd(flat, compute_uv=False)
        if s[-1] <= 1e-10 * s[0]:
            raise RankDeficiencyError(
                f"columns are numerically dependent (smin/smax = {s[-1] / s[0]:.2e})")
    return Frame(field, _gram_schmidt_raw(field, raw))


def haar_frame(d: int, n: int, field: Field, rng: np.random.Generator) -> Frame:
    """Uniform orthonormal n-frame in F^d: Gaussian matrix, orthonormalised."""
    if not 0 <= n <= d:
        raise ValueError("need 0 <= n <= d")
    return Frame(field, haar_frame_batch(d, n, field, rng, batch=None))


def haar_frame_batch(d: int, n: int, field: Field, rng: np.random.Generator,
                     batch: int | None) -> np.ndarray:
    shape = (d, n) if batch is None else (batch, d, n)
    if n == 0:
        return sc.zeros(field, shape)
    g = sc.standard_gaussian(field, shape, rng)
    return _gram_schmidt_raw(field, g)


def haar_unitary(d: int, field: Field, rng: np.random.Generator) -> np.ndarray:
    return haar_frame_batch(d, d, field, rng, batch=None)


# ---------------------------------------------------------------------------
# Projections, compressions, angles.
# ---------------------------------------------------------------------------

def projection(f: Frame) -> Operator:
    """Orthogonal projection F F* onto the span of the frame."""
    m = sc.mat_mul(f.field, f.matrix, sc.adjoint(f.field, f.matrix))
    return Operator(f.field, sc.hermitize(f.field, m), hermitian=True)


def compress(a: Operator, q: Frame, r: Frame) -> np.ndarray:
    """Compression Q* a R of a to the pair of subspaces (dim Q x dim R)."""
    if a.field is not q.field or a.field is not r.field:
        raise ValueError("mismatched fields")
    return sc.mat_mul(a.field, sc.adjoint(a.field, q.matrix),
                      sc.mat_mul(a.field, a.matrix, r.matrix))


def _field_det_hermitian(field: Field, m: np.ndarray) -> float:
    """Determinant of a Hermitian matrix over the field, as a real number."""
    if field is Field.QUATERNION:
        d = m.shape[-3]
        if d <= QDET_ENUM_DIM:
            return sc.qdet(m, check=False)
        val = np.linalg.det(sc.complexify(m)).real
        return float(np.copysign(np.sqrt(abs(val)), val))
    return float(np.linalg.det(m).real)


def cos2(f: Frame, g: Frame) -> float:
    """Squared cosine of the angle between the spans: det of the compression
    of the projection on G to F.  1 iff F is contained in G, 0 iff F meets
    the orthocomplement of G nontrivially."""
    if f.field is not g.field:
        raise ValueError("mismatched fields")
    a = sc.mat_mul(f.field, sc.adjoint(f.field, g.matrix), f.matrix)
    gram = sc.hermitize(f.field, sc.mat_mul(f.field, sc.adjoint(f.field, a), a))
    val = _field_det_hermitian(f.field, gram)
    return float(min(max(val, 0.0), 1.0))


# ---------------------------------------------------------------------------
# Eigendecompositions.
# ---------------------------------------------------------------------------

def _quaternion_eigh(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Spectral decomposition of a quaternion Hermitian matrix.

    The complexified matrix has each eigenvalue doubled; paired eigenvectors
    are folded back to quaternion ones through the j-symmetry of the image
    of the complexification, cluster by cluster.
    """
    d = k.shape[0]
    evc, vecc = np.linalg.eigh(sc.complexify(k))
    lam = (evc[0::2] + evc[1::2]) / 2.0

    scale = max(1.0, float(np.max(np.abs(lam))) if d else 1.0)
    clusters: list[list[int]] = [[0]] if d else []
    for i in range(1, d):
        if lam[i] - lam[clusters[-1][-1]] <= 1e-8 * scale:
            clusters[-1].append(i)
        else:
            clusters.append([i])

    cols = []
    for cl in clusters:
        idx = [2 * i for i in cl] + [2 * i + 1 for i in cl]
        v = vecc[:, sorted(idx)]
        proj_c = v @ v.conj().T
        proj_q = sc.quaternion_from_complex_pairs(proj_c)
        cols.append(_orthonormal_range(proj_q, len(cl)))
    u = np.concatenate(cols, axis=1) if cols else sc.zeros(Field.QUATERNION, (d, 0))

    recon = sc.mat_mul(Field.QUATERNION,
                       sc.scal_mul(Field.QUATERNION, lam[None, :], u),
                       sc.adjoint(Field.QUATERNION, u))
    if sc.max_abs(Field.QUATERNION, recon - k) > 1e-8 * (1.0 + sc.max_abs(Field.QUATERNION, k)):
        raise NumericalError("quaternion eigendecomposition failed to reconstruct input")
    return lam, u


def _orthonormal_range(m: np.ndarray, r: int) -> np.ndarray:
    """Quaternion frame for the range of m (rank r), by pivoted Gram-Schmidt."""
    d = m.shape[0]
    cols = [m[:, j] for j in range(m.shape[1])]
    out: list[np.ndarray] = []
    while len(out) < r:
        norms = [float(np.sum(c * c)) for c in cols]
        j = int(np.argmax(norms))
        v = cols.pop(j)
        v = v / np.sqrt(np.sum(v * v))
        for _ in range(2):
            for q in out:
                coeff = np.sum(sc.quat_mul(sc.quat_conj(q), v), axis=0)
                v = v - sc.quat_mul(q, np.broadcast_to(coeff, q.shape))
        v = v / np.sqrt(np.sum(v * v))
        out.append(v)
        cols = [c - sc.quat_mul(v, np.broadcast_to(
            np.sum(sc.quat_mul(sc.quat_conj(v), c), axis=0), v.shape)) for c in cols]
    return np.stack(out, axis=1) if out else sc.zeros(Field.QUATERNION, (d, 0))


def hermitian_eig(k: Operator) -> tuple[np.ndarray, Frame]:
    """Eigenvalues (real, ascending) and an orthonormal eigenframe."""
    if not sc.is_hermitian(k.field, k.matrix):
        raise sc.HermitianError("hermitian_eig needs a self-adjoint operator")
    m = sc.hermitize(k.field, k.matrix)
    if k.field is Field.QUATERNION:
        lam, u = _quaternion_eigh(m)
    else:
        lam, u = np.linalg.eigh(m)
        recon = (u * lam) @ u.conj().T
        if np.max(np.abs(recon - m)) > 1e-8 * (1.0 + np.max(np.abs(m))):
            raise NumericalError("eigendecomposition failed to reconstruct input")
    return lam, Frame(k.field, u)


# ---------------------------------------------------------------------------
# Oblique projectors and transversality.
# ---------------------------------------------------------------------------

def transversal(q: Frame, h: Frame, tol: float = 1e-12) -> bool:
    """Whether H* Q is invertible, i.e. Q is a complement of the
    orthocomplement of H.  Decided on the complexified determinant."""
    a = sc.mat_mul(q.field, sc.adjoint(q.field, h.matrix), q.matrix)
    flat = sc.complexify(a) if q.field is Field.QUATERNION else a
    return bool(abs(np.linalg.det(flat)) > tol)


def oblique_projector(q: Frame, h: Frame) -> Operator:
    """Projector onto span Q along the orthocomplement of H:
    P = Q (H* Q)^{-1} H*, defined when the two spans are transversal."""
    if q.n != h.n:
        raise ValueError("oblique projector needs dim Q = dim H")
    if not transversal(q, h):
        raise SingularityError("Q meets the orthocomplement of H; projector undefined")
    field = q.field
    hq = sc.mat_mul(field, sc.adjoint(field, h.matrix), q.matrix)
    x = sc.solve(field, hq, sc.adjoint(field, h.matrix))
    return Operator(field, sc.mat_mul(field, q.matrix, x))


def intersection_dim(f: Frame, w: Frame, tol: float = RANK_REL_TOL) -> int:
    """dim(span F ∩ span W) = dim F + dim W - rank [F | W]."""
    if f.field is not w.field:
        raise ValueError("mismatched fields")
    axis = -2 if f.field is Field.QUATERNION else -1
    stacked = np.concatenate([f.matrix, w.matrix], axis=axis)
    return f.n + w.n - sc.rank(f.field, stacked, rel_tol=tol)


# ---------------------------------------------------------------------------
# Determinantal densities.
# ---------------------------------------------------------------------------

def schur_density(k: Operator, q: Frame) -> float:
    """Density det(K P_Q + (1-K) P_{Q^perp}) of a contraction K at the
    subspace spanned by q, equal to (-1)^codim * det(K - P_{Q^perp}); the
    quaternion case uses the Moore determinant of the Hermitian form."""
    field = k.field
    pq = projection(q).matrix
    pperp = sc.eye(field, k.d) - pq
    if field is Field.QUATERNION:
        codim = k.d - q.n
        val = _field_det_hermitian(field, k.matrix - pperp)
        val = val if codim % 2 == 0 else -val
    else:
        val = float(np.linalg.det(k.matrix @ pq + (sc.eye(field, k.d) - k.matrix) @ pperp).real)
    return val
