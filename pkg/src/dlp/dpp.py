"""Discrete determinantal point processes on {1, ..., d} over R, C and H.

Subsets are bitmask integers: bit i set means index i (0-based) is in the
subset.  Probability tables over all 2^d subsets are numpy arrays indexed by
bitmask.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_attr

import numpy as np

from . import linalg
from . import scalars as sc
from .scalars import BudgetError, Field
from .splitspace import SplitSpace

__all__ = [
    "Kernel",
    "KernelSpectrumError",
    "NumericalGuardError",
    "incidence_prob",
    "subset_density",
    "density_table",
    "incidence_table",
    "sample_recursive",
    "sample_recursive_batch",
    "sample_enumerated",
    "sample_enumerated_batch",
    "mobius_invert",
    "zeta_transform",
    "popcounts",
]

ENUMERATION_MAX_DIM = 20
SPECTRUM_TOL = 1e-9
PIVOT_CLAMP = 1e-9
PIVOT_GUARD = 1e-7


class KernelSpectrumError(ValueError):
    pass


class NumericalGuardError(RuntimeError):
    pass


@dataclass(frozen=True)
class Kernel:
    """Self-adjoint contraction on a split space, spectrum clamped to [0, 1]."""

    space: SplitSpace
    matrix: np.ndarray
    eigenvalues: np.ndarray = dc_attr(init=False, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix)
        field = self.space.field
        d = self.space.dim
        rows = m.shape[-3] if field is Field.QUATERNION else m.shape[-2]
        if rows != d or (m.shape[-2] if field is Field.QUATERNION else m.shape[-1]) != d:
            raise ValueError("kernel dimension does not match the space")
        if not sc.is_hermitian(field, m, tol=SPECTRUM_TOL):
            raise sc.HermitianError("kernel is not self-adjoint")
        lam, frame = linalg.hermitian_eig(linalg.Operator(field, sc.hermitize(field, m)))
        if lam.size and (lam[0] < -SPECTRUM_TOL or lam[-1] > 1.0 + SPECTRUM_TOL):
            raise KernelSpectrumError(
                f"spectrum [{lam[0]:.3e}, {lam[-1]:.3e}] escapes [0, 1]")
        clipped = np.clip(lam, 0.0, 1.0)
        u = frame.matrix
        m = sc.mat_mul(field, sc.scal_mul(field, clipped[None, :], u), sc.adjoint(field, u))
        object.__setattr__(self, "matrix", sc.hermitize(field, m))
        object.__setattr__(self, "eigenvalues", clipped)

    @property
    def field(self) -> Field:
        return self.space.field

    @property
    def d(self) -> int:
        return self.space.dim

    def projection_rank(self, tol: float = 1e-8):
        """Rank if the spectrum sits on {0, 1} within tol, else None."""
        lam = self.eigenvalues
        near01 = np.minimum(np.abs(lam), np.abs(1.0 - lam)) <= tol
        return int(np.sum(lam > 0.5)) if bool(np.all(near01)) else None

    def complement(self) -> "Kernel":
        return Kernel(self.space, sc.eye(self.field, self.d) - self.matrix)

    def scale(self, p: float) -> "Kernel":
        if not 0.0 <= p <= 1.0:
            raise ValueError("scaling factor must lie in [0, 1]")
        return Kernel(self.space, sc.scal_mul(self.field, p, self.matrix))


def popcounts(d: int) -> np.ndarray:
    """Subset sizes |I| for every bitmask below 2^d."""
    masks = np.arange(1 << d, dtype=np.uint32)
    counts = np.zeros(1 << d, dtype=np.int64)
    for b in range(d):
        counts += (masks >> b) & 1
    return counts


def _mask_bools(mask: int, d: int) -> np.ndarray:
    return np.array([(mask >> i) & 1 for i in range(d)], dtype=bool)


def incidence_prob(kernel: Kernel, mask: int) -> float:
    """P(J ⊆ X) = det K^J_J; the empty minor is 1."""
    idx = np.flatnonzero(_mask_bools(mask, kernel.d))
    if kernel.field is Field.QUATERNION:
        sub = kernel.matrix[np.ix_(idx, idx)]
        return sc.qdet(sub, check=False) if idx.size else 1.0
    sub = kernel.matrix[np.ix_(idx, idx)]
    return float(np.linalg.det(sub).real) if idx.size else 1.0


def subset_density(kernel: Kernel, mask: int) -> float:
    """P(X = I) = det(K P_I + (1-K) P_{I^c}); Moore-determinant form in H."""
    sel = _mask_bools(mask, kernel.d)
    k = kernel.matrix
    if kernel.field is Field.QUATERNION:
        m = k.copy()
        off = np.flatnonzero(~sel)
        m[off, off, 0] -= 1.0
        val = linalg._field_det_hermitian(Field.QUATERNION, m)
        return val if off.size % 2 == 0 else -val
    cols = np.where(sel[None, :], k, sc.eye(kernel.field, kernel.d) - k)
    return float(np.linalg.det(cols).real)


def density_table(kernel: Kernel) -> np.ndarray:
    """Exact distribution over all 2^d subsets, indexed by bitmask."""
    d = kernel.d
    if d > ENUMERATION_MAX_DIM:
        raise BudgetError(f"2^{d} table exceeds the enumeration budget of 2^{ENUMERATION_MAX_DIM}")
    masks = np.arange(1 << d, dtype=np.uint32)
    sel = ((masks[:, None] >> np.arange(d)[None, :]) & 1).astype(bool)
    k = kernel.matrix
    if kernel.field is Field.QUATERNION:
        stack = np.broadcast_to(k, (1 << d,) + k.shape).copy()
        diag = np.arange(d)
        stack[:, diag, diag, 0] -= (~sel).astype(float)
        signs = np.where((d - popcounts(d)) % 2 == 0, 1.0, -1.0)
        if d <= linalg.QDET_ENUM_DIM:
            vals = signs * sc.qdet_batch(stack)
        else:
            # densities are nonnegative, so the Moore determinant is the
            # signed square root of the complexified determinant
            dets = np.linalg.det(sc.complexify(stack)).real
            vals = np.sqrt(np.maximum(dets, 0.0))
        return np.maximum(vals, 0.0)
    eye = sc.eye(kernel.field, d)
    out = np.empty(1 << d)
    chunk = max(1, (1 << 22) // max(1, d * d))
    for lo in range(0, 1 << d, chunk):
        s = sel[lo:lo + chunk]
        stack = np.where(s[:, None, :], k[None, :, :], (eye - k)[None, :, :])
        out[lo:lo + chunk] = np.linalg.det(stack).real
    return np.maximum(out, 0.0)


def incidence_table(kernel: Kernel) -> np.ndarray:
    """All incidence probabilities P(J ⊆ X), indexed by bitmask of J."""
    d = kernel.d
    if d > ENUMERATION_MAX_DIM:
        raise BudgetError(f"2^{d} table exceeds the enumeration budget of 2^{ENUMERATION_MAX_DIM}")
    return np.array([incidence_prob(kernel, m) for m in range(1 << d)])


def mobius_invert(incidence: np.ndarray) -> np.ndarray:
    """Recover subset probabilities from incidence probabilities:
    P(X = I) = sum_{J ⊇ I} (-1)^{|J \\ I|} P(J ⊆ X)."""
    f = np.array(incidence, dtype=float, copy=True)
    size = f.size
    d = size.bit_length() - 1
    if 1 << d != size:
        raise ValueError("incidence table must have length 2^d")
    for b in range(d):
        half = 1 << b
        view = f.reshape(-1, 2 * half)
        view[:, :half] -= view[:, half:]
    return f


def zeta_transform(distribution: np.ndarray) -> np.ndarray:
    """Incidence probabilities from subset probabilities (inverse of
    mobius_invert): P(J ⊆ X) = sum_{I ⊇ J} P(X = I)."""
    f = np.array(distribution, dtype=float, copy=True)
    d = f.size.bit_length() - 1
    for b in range(d):
        half = 1 << b
        view = f.reshape(-1, 2 * half)
        view[:, :half] += view[:, half:]
    return f


# ---------------------------------------------------------------------------
# Samplers.
# ---------------------------------------------------------------------------

def sample_recursive_batch(kernels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Exact sampling of a stack (B, d, d) of real or complex contraction
    kernels by pivoting on index 0 and passing to the Schur-complement
    conditional kernel.  Returns booleans of shape (B, d)."""
    work = np.array(kernels, copy=True)
    single = work.ndim == 2
    if single:
        work = work[None]
    b, d = work.shape[0], work.shape[1]
    taken = np.zeros((b, d), dtype=bool)
    for step in range(d):
        sub = work[:, step:, step:]
        p = sub[:, 0, 0].real.copy()
        if np.any(p < -PIVOT_GUARD) or np.any(p > 1.0 + PIVOT_GUARD):
            raise NumericalGuardError(
                f"conditional kernel pivot escaped [0,1] by more than {PIVOT_GUARD}")
        p[np.abs(p) <= PIVOT_CLAMP] = 0.0
        p[np.abs(1.0 - p) <= PIVOT_CLAMP] = 1.0
        p = np.clip(p, 0.0, 1.0)
        take = rng.random(b) < p
        taken[:, step] = take
        if step == d - 1:
            break
        denom = np.where(take, p, p - 1.0)
        update = sub[:, 1:, :1] * (sub[:, :1, 1:] / denom[:, None, None])
        sub[:, 1:, 1:] -= update
    return taken[0] if single else taken


def sample_recursive(kernel: Kernel, rng: np.random.Generator) -> int:
    """Exact sample of the DPP with the given kernel (R and C only)."""
    if kernel.field is Field.QUATERNION:
        raise ValueError("the recursive sampler is not certified for quaternion kernels; "
                         "use sample_enumerated")
    taken = sample_recursive_batch(kernel.matrix, rng)
    return int(sum(1 << int(i) for i in np.nonzero(taken)[0]))


def sample_enumerated_batch(table: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws of bitmasks from an exact 2^d distribution table."""
    t = np.asarray(table, dtype=float)
    total = t.sum()
    if not np.isclose(total, 1.0, atol=1e-6):
        raise ValueError(f"table mass {total} is not 1")
    cdf = np.cumsum(t / total)
    u = rng.random(size)
    return np.searchsorted(cdf, u, side="right").clip(0, t.size - 1)


def sample_enumerated_batch_rows(tables: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One inverse-CDF draw per row of a stack (B, 2^d) of distribution tables."""
    cdf = np.cumsum(tables, axis=1)
    cdf /= cdf[:, -1:]
    u = rng.random(tables.shape[0])
    return np.minimum((cdf < u[:, None]).sum(axis=1), tables.shape[1] - 1)


def sample_enumerated(kernel: Kernel, rng: np.random.Generator,
                      table: np.ndarray | None = None) -> int:
    """Exact sample by inverse CDF over the full 2^d table.  Works over all
    three coefficient fields; the only certified quaternion sampler."""
    if table is None:
        table = density_table(kernel)
    return int(sample_enumerated_batch(table, 1, rng)[0])
