"""Coefficient algebras: the reals, the complexes and the quaternions.

Matrices over the three algebras share one numpy-backed representation:

* real matrices are ``float64`` arrays of shape ``(m, n)``,
* complex matrices are ``complex128`` arrays of shape ``(m, n)``,
* quaternion matrices are ``float64`` arrays of shape ``(m, n, 4)``, the
  trailing axis holding the coefficients of ``1, i, j, k``.

All helpers accept extra leading batch axes.  Quaternion products are
evaluated through the structure tensor of the algebra, so real, complex and
quaternion code paths stay parallel.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

__all__ = [
    "Field",
    "Quaternion",
    "BudgetError",
    "HermitianError",
    "tau_det",
    "qdet",
    "qdet_batch",
    "complexify",
    "realify",
    "quaternion_from_complex_pairs",
]

TAU_DET_MAX_DIM = 12


class BudgetError(ValueError):
    """A dimension exceeded an enumeration or table budget."""


class HermitianError(ValueError):
    """An input violated a self-adjointness precondition."""


class Field(Enum):
    """Tag for the coefficient algebra of a matrix or space."""

    REAL = "real"
    COMPLEX = "complex"
    QUATERNION = "quaternion"

    @property
    def order(self) -> int:
        return {"real": 0, "complex": 1, "quaternion": 2}[self.value]

    @property
    def coeff_dim(self) -> int:
        """Dimension of the algebra over the reals."""
        return {"real": 1, "complex": 2, "quaternion": 4}[self.value]

    def __lt__(self, other: "Field") -> bool:
        return self.order < other.order


# Structure tensor: e_a e_b = sum_c QTAB[a, b, c] e_c for (1, i, j, k).
QTAB = np.zeros((4, 4, 4))
QTAB[0, :, :] = np.eye(4)
QTAB[1:, 0, 1:] = np.eye(3)
QTAB[1, 1, 0] = QTAB[2, 2, 0] = QTAB[3, 3, 0] = -1.0
QTAB[1, 2, 3] = QTAB[2, 3, 1] = QTAB[3, 1, 2] = 1.0
QTAB[2, 1, 3] = QTAB[3, 2, 1] = QTAB[1, 3, 2] = -1.0

QUAT_CONJ_SIGNS = np.array([1.0, -1.0, -1.0, -1.0])


def quat_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Quaternion product, broadcasting over leading axes of (..., 4) arrays."""
    a, b, c, d = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    e, f, g, h = y[..., 0], y[..., 1], y[..., 2], y[..., 3]
    return np.stack(
        [a * e - b * f - c * g - d * h,
         a * f + b * e + c * h - d * g,
         a * g - b * h + c * e + d * f,
         a * h + b * g - c * f + d * e],
        axis=-1,
    )


def quat_conj(x: np.ndarray) -> np.ndarray:
    return x * QUAT_CONJ_SIGNS


@dataclass(frozen=True)
class Quaternion:
    """A single quaternion a + b i + c j + d k."""

    a: float
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(*quat_mul(self.coeffs, other.coeffs))

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(*(self.coeffs + other.coeffs))

    def __neg__(self) -> "Quaternion":
        return Quaternion(*(-self.coeffs))

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d])

    @property
    def conj(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    @property
    def re(self) -> float:
        return self.a

    @property
    def abs2(self) -> float:
        return float(self.a**2 + self.b**2 + self.c**2 + self.d**2)


# ---------------------------------------------------------------------------
# Generic matrix helpers, dispatching on the field tag.
# ---------------------------------------------------------------------------

def zeros(field: Field, shape: tuple) -> np.ndarray:
    if field is Field.REAL:
        return np.zeros(shape)
    if field is Field.COMPLEX:
        return np.zeros(shape, dtype=complex)
    return np.zeros(shape + (4,))


def eye(field: Field, n: int) -> np.ndarray:
    if field is Field.QUATERNION:
        out = np.zeros((n, n, 4))
        out[np.arange(n), np.arange(n), 0] = 1.0
        return out
    return np.eye(n, dtype=complex if field is Field.COMPLEX else float)


def from_real(field: Field, x: np.ndarray) -> np.ndarray:
    """Embed a real array entrywise into the given algebra."""
    x = np.asarray(x, dtype=float)
    if field is Field.REAL:
        return x
    if field is Field.COMPLEX:
        return x.astype(complex)
    out = np.zeros(x.shape + (4,))
    out[..., 0] = x
    return out


def conj(field: Field, a: np.ndarray) -> np.ndarray:
    if field is Field.REAL:
        return a
    if field is Field.COMPLEX:
        return np.conj(a)
    return a * QUAT_CONJ_SIGNS


def transpose(field: Field, a: np.ndarray) -> np.ndarray:
    if field is Field.QUATERNION:
        return np.swapaxes(a, -3, -2)
    return np.swapaxes(a, -2, -1)


def adjoint(field: Field, a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return transpose(field, conj(field, a))


def mat_mul(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if field is Field.QUATERNION:
        # multiply in the complex representation (BLAS) and fold back
        return quaternion_from_complex_pairs(complexify(a) @ complexify(b))
    return a @ b


def scal_mul(field: Field, real_scalar, a: np.ndarray) -> np.ndarray:
    """Multiply by a real scalar or by a real array broadcast over entries."""
    s = np.asarray(real_scalar)
    if field is Field.QUATERNION and s.ndim:
        return a * s[..., None]
    return a * s


def real_part(field: Field, a: np.ndarray) -> np.ndarray:
    if field is Field.REAL:
        return a
    if field is Field.COMPLEX:
        return a.real
    return a[..., 0]


def abs2(field: Field, a: np.ndarray) -> np.ndarray:
    """Entrywise squared modulus, as a real array."""
    if field is Field.REAL:
        return a * a
    if field is Field.COMPLEX:
        return (a * np.conj(a)).real
    return np.sum(a * a, axis=-1)


def max_abs(field: Field, a: np.ndarray) -> float:
    return float(np.sqrt(np.max(abs2(field, a)))) if a.size else 0.0


def standard_gaussian(field: Field, shape: tuple, rng: np.random.Generator) -> np.ndarray:
    """Standard Gaussian matrix with E[|entry|^2] = 1 in every algebra."""
    if field is Field.REAL:
        return rng.standard_normal(shape)
    if field is Field.COMPLEX:
        z = rng.standard_normal(shape + (2,))
        return (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)
    return rng.standard_normal(shape + (4,)) / 2.0


def is_hermitian(field: Field, a: np.ndarray, tol: float = 1e-9) -> bool:
    diff = a - adjoint(field, a)
    return max_abs(field, diff) <= tol * (1.0 + max_abs(field, a))


def hermitize(field: Field, a: np.ndarray) -> np.ndarray:
    return (a + adjoint(field, a)) / 2.0


def det(field: Field, a: np.ndarray):
    """Determinant over R or C (batched).  Quaternion matrices need qdet."""
    if field is Field.QUATERNION:
        raise ValueError("no alternating determinant over the quaternions; use qdet")
    return np.linalg.det(a)


def solve(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a x = b.  Quaternion systems go through the complex representation."""
    if field is Field.QUATERNION:
        return quaternion_from_complex_pairs(np.linalg.solve(complexify(a), complexify(b)))
    return np.linalg.solve(a, b)


def inv(field: Field, a: np.ndarray) -> np.ndarray:
    if field is Field.QUATERNION:
        return quaternion_from_complex_pairs(np.linalg.inv(complexify(a)))
    return np.linalg.inv(a)


def rank(field: Field, a: np.ndarray, rel_tol: float = 1e-8) -> int:
    """Numerical rank over the field, via singular values of the real/complex form."""
    m = complexify(a) if field is Field.QUATERNION else a
    if min(m.shape) == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    r = int(np.sum(s > rel_tol * s[0]))
    return r // 2 if field is Field.QUATERNION else r


# ---------------------------------------------------------------------------
# Restriction of scalars.
# ---------------------------------------------------------------------------

def realify(m: np.ndarray) -> np.ndarray:
    """Complex (..., p, q) -> real (..., 2p, 2q), each entry a+bi becoming
    [[a, -b], [b, a]].  Algebra morphism with det(realify(M)) = |det M|^2."""
    m = np.asarray(m, dtype=complex)
    p, q = m.shape[-2:]
    out = np.zeros(m.shape[:-2] + (p, 2, q, 2))
    out[..., 0, :, 0] = m.real
    out[..., 0, :, 1] = -m.imag
    out[..., 1, :, 0] = m.imag
    out[..., 1, :, 1] = m.real
    return out.reshape(m.shape[:-2] + (2 * p, 2 * q))


def complexify(m: np.ndarray) -> np.ndarray:
    """Quaternion (..., p, q, 4) -> complex (..., 2p, 2q).

    Entry a + bi + cj + dk maps to [[a - d i, -b + c i], [b + c i, a + d i]],
    the representation generated by I = [[0,-1],[1,0]], J = [[0,i],[i,0]],
    K = [[-i,0],[0,i]].  Entrywise algebra morphism commuting with adjoints.
    """
    m = np.asarray(m, dtype=float)
    p, q = m.shape[-3:-1]
    a, b, c, d = (m[..., k] for k in range(4))
    out = np.zeros(m.shape[:-3] + (p, 2, q, 2), dtype=complex)
    out[..., 0, :, 0] = a - 1j * d
    out[..., 0, :, 1] = -b + 1j * c
    out[..., 1, :, 0] = b + 1j * c
    out[..., 1, :, 1] = a + 1j * d
    return out.reshape(m.shape[:-3] + (2 * p, 2 * q))


def quaternion_from_complex_pairs(m: np.ndarray) -> np.ndarray:
    """Inverse of :func:`complexify` on its image.

    Each 2x2 block is averaged through the j-symmetry of the image, so the
    map is well behaved on nearly-symmetric numerical input.
    """
    m = np.asarray(m, dtype=complex)
    p2, q2 = m.shape[-2:]
    blocks = m.reshape(m.shape[:-2] + (p2 // 2, 2, q2 // 2, 2))
    u = (blocks[..., 0, :, 0] + np.conj(blocks[..., 1, :, 1])) / 2.0
    v = (blocks[..., 0, :, 1] - np.conj(blocks[..., 1, :, 0])) / 2.0
    out = np.empty(m.shape[:-2] + (p2 // 2, q2 // 2, 4))
    out[..., 0] = u.real
    out[..., 1] = -v.real
    out[..., 2] = v.imag
    out[..., 3] = -u.imag
    return out


# ---------------------------------------------------------------------------
# Permutation-expansion determinants over a possibly noncommutative ring.
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _cycle_table(d: int):
    """All permutations of range(d) as (sign, cycles), cycles rooted at their
    minimal element.  Cached for the small dimensions we enumerate."""
    table = []
    for perm in itertools.permutations(range(d)):
        seen = [False] * d
        cycles = []
        n_cycles = 0
        for start in range(d):
            if seen[start]:
                continue
            n_cycles += 1
            cyc = [start]
            seen[start] = True
            j = perm[start]
            while j != start:
                cyc.append(j)
                seen[j] = True
                j = perm[j]
            cycles.append(tuple(cyc))
        sign = 1 if (d - n_cycles) % 2 == 0 else -1
        table.append((sign, tuple(cycles)))
    return tuple(table)


def _qmul_tuple(x, y):
    a, b, c, d = x
    e, f, g, h = y
    return (
        a * e - b * f - c * g - d * h,
        a * f + b * e + c * h - d * g,
        a * g - b * h + c * e + d * f,
        a * h + b * g - c * f + d * e,
    )


def tau_det(m: np.ndarray, tau=None, field: Field | None = None):
    """Permutation-expansion determinant with a trace map applied per cycle.

    ``tau_det(M) = sum_s sign(s) prod_{cycles (i1..ir) of s}
    tau(M[i1,i2] M[i2,i3] ... M[ir,i1])``, each cycle rooted at its minimal
    index.  ``tau`` must satisfy tau(xy) = tau(yx); it defaults to the
    identity over R and C and to the real part over the quaternions.  The
    result is Z-linear in columns and vanishes when a column vanishes.
    """
    m = np.asarray(m)
    if field is None:
        field = Field.QUATERNION if m.ndim == 3 else (
            Field.COMPLEX if np.iscomplexobj(m) else Field.REAL)
    d = m.shape[0]
    if m.shape[: 2] != (d, d):
        raise ValueError("tau_det needs a square matrix")
    if d > TAU_DET_MAX_DIM:
        raise BudgetError(f"tau_det enumerates d! permutations; d={d} exceeds {TAU_DET_MAX_DIM}")
    if d == 0:
        return 1.0

    if field is Field.QUATERNION:
        entries = [[tuple(m[i, j]) for j in range(d)] for i in range(d)]
        if tau is None:
            tau = lambda q: q[0]
        total = 0.0
        for sign, cycles in _cycle_table(d):
            term = 1.0
            for cyc in cycles:
                prod = entries[cyc[0]][cyc[1 % len(cyc)]] if len(cyc) > 1 else entries[cyc[0]][cyc[0]]
                for a, b in zip(cyc[1:], cyc[2:] + (cyc[0],)):
                    prod = _qmul_tuple(prod, entries[a][b])
                term *= tau(prod)
            total += sign * term
        return total

    if tau is None:
        tau = lambda x: x
    total = 0.0
    for sign, cycles in _cycle_table(d):
        term = 1.0
        for cyc in cycles:
            prod = m[cyc[0], cyc[1 % len(cyc)]] if len(cyc) > 1 else m[cyc[0], cyc[0]]
            for a, b in zip(cyc[1:], cyc[2:] + (cyc[0],)):
                prod = prod * m[a, b]
            term = term * tau(prod)
        total = total + sign * term
    return total


def _check_quaternion_hermitian(k: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    scale = 1.0 + max_abs(Field.QUATERNION, k)
    if max_abs(Field.QUATERNION, k - adjoint(Field.QUATERNION, k)) > 1e-9 * scale:
        raise HermitianError("matrix is not quaternion Hermitian")
    return hermitize(Field.QUATERNION, k)


def qdet(k: np.ndarray, check: bool = True) -> float:
    """Moore determinant of a quaternion Hermitian matrix: tau_det with the
    real part as trace map.  Basis invariant, and qdet(K)^2 = det(complexify(K)).
    """
    k = np.asarray(k, dtype=float)
    if check:
        k = _check_quaternion_hermitian(k)
    return float(tau_det(k, field=Field.QUATERNION))


def qdet_batch(ks: np.ndarray) -> np.ndarray:
    """Moore determinants of a stack (..., d, d, 4) of quaternion Hermitian
    matrices, vectorised over the leading axes.  Budgeted like tau_det."""
    ks = np.asarray(ks, dtype=float)
    d = ks.shape[-3]
    if d > TAU_DET_MAX_DIM:
        raise BudgetError(f"qdet_batch enumerates d! permutations; d={d} exceeds {TAU_DET_MAX_DIM}")
    if d == 0:
        return np.ones(ks.shape[:-3])
    total = np.zeros(ks.shape[:-3])
    for sign, cycles in _cycle_table(d):
        term = np.ones(ks.shape[:-3])
        for cyc in cycles:
            if len(cyc) == 1:
                prod = ks[..., cyc[0], cyc[0], :]
            else:
                prod = ks[..., cyc[0], cyc[1], :]
                for a, b in zip(cyc[1:], cyc[2:] + (cyc[0],)):
                    prod = quat_mul(prod, ks[..., a, b, :])
            term = term * prod[..., 0]
        total += sign * term
    return total
