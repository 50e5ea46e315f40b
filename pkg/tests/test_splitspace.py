import math

import numpy as np
import pytest
from scipy import stats

from dlp import linalg, splitspace
from dlp import scalars as sc
from dlp.linalg import Frame
from dlp.scalars import Field
from dlp.splitspace import AdaptedSubspace, SplitSpace

RNG = np.random.default_rng(303)


def test_split_space_validation():
    with pytest.raises(ValueError):
        SplitSpace(Field.REAL, ())
    with pytest.raises(ValueError):
        SplitSpace(Field.REAL, (2, 0))
    sp = SplitSpace(Field.COMPLEX, (2, 3, 1))
    assert sp.dim == 6 and sp.offsets == (0, 2, 5)
    assert list(sp.block_of_index()) == [0, 0, 1, 1, 1, 2]


def test_split_dimension_examples():
    sp = SplitSpace(Field.REAL, (2, 2))
    zero = AdaptedSubspace(sp, (np.zeros((2, 0)), np.zeros((2, 0))))
    assert splitspace.split_dimension(zero) == (0, 0)
    full = AdaptedSubspace(sp, (np.eye(2), np.eye(2)))
    assert splitspace.split_dimension(full) == (2, 2)
    one = AdaptedSubspace(sp, (np.zeros((2, 0)), np.eye(2)[:, :1]))
    assert splitspace.split_dimension(one) == (0, 1)


def test_mass_bookkeeping():
    for dims in ((1, 1, 1), (2, 3), (4,), (2, 2, 2)):
        sp = SplitSpace(Field.REAL, dims)
        total = sum(splitspace.stratum_measure_mass(sp, nb) for nb in splitspace.strata(sp))
        assert total == 2 ** sp.dim


def test_sample_uniform_adapted_edges():
    sp = SplitSpace(Field.COMPLEX, (2, 3))
    zero = splitspace.sample_uniform_adapted(sp, (0, 0), RNG)
    assert zero.dim == 0
    full = splitspace.sample_uniform_adapted(sp, (2, 3), RNG)
    f = splitspace.join_frame(full)
    assert np.max(np.abs(linalg.projection(f).matrix - np.eye(5))) < 1e-10
    with pytest.raises(ValueError):
        splitspace.sample_uniform_adapted(sp, (3, 0), RNG)


def test_uniform_line_angle_is_uniform():
    n = 100000
    x = linalg.haar_frame_batch(2, 1, Field.REAL, RNG, batch=n)[:, :, 0]
    angles = np.arctan2(x[:, 1], x[:, 0]) % math.pi
    assert stats.kstest(angles / math.pi, "uniform").pvalue > 0.001


def test_uniform_sampling_equivariance():
    # distribution of cos^2 against a fixed subspace is unchanged when a
    # fixed block-diagonal isometry acts on the draws
    sp = SplitSpace(Field.REAL, (2, 2))
    n = 3000
    u = np.zeros((4, 4))
    u[:2, :2] = linalg.haar_unitary(2, Field.REAL, np.random.default_rng(1))
    u[2:, 2:] = linalg.haar_unitary(2, Field.REAL, np.random.default_rng(2))
    w = linalg.haar_frame(4, 2, Field.REAL, np.random.default_rng(3))
    vals, vals_rot = [], []
    for i in range(n):
        q = splitspace.sample_uniform_adapted(sp, (1, 1), RNG)
        f = splitspace.join_frame(q)
        vals.append(linalg.cos2(f, w))
        vals_rot.append(linalg.cos2(Frame(Field.REAL, u @ f.matrix), w))
    assert stats.ks_2samp(vals, vals_rot).pvalue > 0.001


def test_orthocomplement():
    sp = SplitSpace(Field.COMPLEX, (2, 3))
    q = splitspace.sample_uniform_adapted(sp, (1, 2), RNG)
    comp = splitspace.orthocomplement(q)
    assert comp.stratum == (1, 1)
    pq = linalg.projection(splitspace.join_frame(q)).matrix
    pc = linalg.projection(splitspace.join_frame(comp)).matrix
    assert np.max(np.abs(pq + pc - np.eye(5))) < 1e-10
    double = splitspace.orthocomplement(comp)
    pd = linalg.projection(splitspace.join_frame(double)).matrix
    assert np.max(np.abs(pd - pq)) < 1e-9
    # extremes
    full = splitspace.sample_uniform_adapted(sp, (2, 3), RNG)
    assert splitspace.orthocomplement(full).dim == 0
    zero = splitspace.sample_uniform_adapted(sp, (0, 0), RNG)
    assert splitspace.orthocomplement(zero).stratum == (2, 3)


def test_join_frame():
    sp = SplitSpace(Field.REAL, (3, 2))
    q = AdaptedSubspace(sp, (np.eye(3), np.zeros((2, 0))))
    assert np.allclose(splitspace.join_frame(q).matrix, np.eye(5)[:, :3])
    q2 = splitspace.sample_uniform_adapted(sp, (2, 1), RNG)
    f = splitspace.join_frame(q2)
    assert np.max(np.abs(f.matrix.T @ f.matrix - np.eye(3))) < 1e-10


def test_join_frame_quaternion():
    sp = SplitSpace(Field.QUATERNION, (2, 2))
    q = splitspace.sample_uniform_adapted(sp, (1, 2), RNG)
    f = splitspace.join_frame(q)
    gram = sc.mat_mul(Field.QUATERNION, sc.adjoint(Field.QUATERNION, f.matrix), f.matrix)
    assert sc.max_abs(Field.QUATERNION, gram - sc.eye(Field.QUATERNION, 3)) < 1e-10


def test_restrict_scalars_complex_identity():
    sp = SplitSpace(Field.COMPLEX, (1, 1))
    sp2, m2 = splitspace.restrict_scalars(sp, np.eye(2, dtype=complex))
    assert sp2.field is Field.REAL and sp2.block_dims == (2, 2)
    assert np.allclose(m2, np.eye(4))
    with pytest.raises(ValueError):
        splitspace.restrict_scalars(sp2, m2)


def test_restrict_scalars_quaternion_projection_rank_doubles():
    sp = SplitSpace(Field.QUATERNION, (2,))
    f = linalg.haar_frame(2, 1, Field.QUATERNION, RNG)
    p = linalg.projection(f).matrix
    sp2, m2 = splitspace.restrict_scalars(sp, p)
    assert sp2.field is Field.COMPLEX and sp2.block_dims == (4,)
    ev = np.linalg.eigvalsh(m2)
    assert np.allclose(np.round(ev), [0, 0, 1, 1])


def test_restrict_scalars_spectrum_doubles():
    sp = SplitSpace(Field.COMPLEX, (3,))
    u = linalg.haar_unitary(3, Field.COMPLEX, RNG)
    lam = RNG.random(3)
    k = sc.hermitize(Field.COMPLEX, (u * lam) @ u.conj().T)
    _, m2 = splitspace.restrict_scalars(sp, k)
    ev = np.linalg.eigvalsh(m2)
    assert np.max(np.abs(ev - np.repeat(np.sort(lam), 2))) < 1e-10
