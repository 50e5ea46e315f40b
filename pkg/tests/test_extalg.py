import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlp import dpp, extalg, linalg, splitspace
from dlp import scalars as sc
from dlp.dpp import Kernel
from dlp.linalg import Frame, Operator
from dlp.scalars import Field
from dlp.splitspace import SplitSpace

RNG = np.random.default_rng(505)


def random_kernel(field, d, rng, projection_rank=None):
    u = linalg.haar_unitary(d, field, rng)
    lam = rng.random(d) if projection_rank is None else \
        np.array([1.0] * projection_rank + [0.0] * (d - projection_rank))
    m = sc.mat_mul(field, sc.scal_mul(field, lam[None, :], u), sc.adjoint(field, u))
    return Kernel(SplitSpace(field, (1,) * d), sc.hermitize(field, m))


def test_wedge_identity_and_diagonal():
    d = 4
    w = extalg.wedge_operator(Operator(Field.REAL, np.eye(d)))
    assert np.allclose(w.matrix, np.eye(1 << d))
    diag = np.diag([2.0, 3.0, 5.0, 7.0])
    wd = extalg.wedge_operator(Operator(Field.REAL, diag))
    products = [np.prod([[2, 3, 5, 7][i] for i in range(4) if (m >> i) & 1])
                for m in range(16)]
    assert np.allclose(np.diag(wd.matrix), products)
    assert np.allclose(wd.matrix - np.diag(np.diag(wd.matrix)), 0.0)


def test_wedge_trace_and_multiplicativity():
    a = sc.standard_gaussian(Field.COMPLEX, (4, 4), RNG)
    b = sc.standard_gaussian(Field.COMPLEX, (4, 4), RNG)
    wa = extalg.wedge_operator(Operator(Field.COMPLEX, a))
    wb = extalg.wedge_operator(Operator(Field.COMPLEX, b))
    wab = extalg.wedge_operator(Operator(Field.COMPLEX, a @ b))
    assert abs(np.trace(wa.matrix) - np.linalg.det(np.eye(4) + a)) < 1e-10
    assert np.max(np.abs(wab.matrix - wa.matrix @ wb.matrix)) < 1e-10


def test_wedge_degree_structure():
    a = RNG.standard_normal((3, 3))
    w = extalg.wedge_operator(Operator(Field.REAL, a)).matrix
    sizes = dpp.popcounts(3)
    off = w[sizes[:, None] != sizes[None, :]]
    assert np.allclose(off, 0.0)


def test_plucker_examples():
    f = Frame(Field.REAL, np.eye(4)[:, :2])
    v = extalg.plucker(f)
    expected = np.zeros(16)
    expected[0b0011] = 1.0
    assert np.allclose(v.coords, expected)
    g = linalg.haar_frame(4, 3, Field.REAL, RNG)
    assert abs(np.vdot(extalg.plucker(g).coords, v.coords)) < 1e-12


def test_plucker_cos2_identity():
    f = linalg.haar_frame(5, 2, Field.COMPLEX, RNG)
    g = linalg.haar_frame(5, 2, Field.COMPLEX, RNG)
    inner = np.vdot(extalg.plucker(f).coords, extalg.plucker(g).coords)
    assert abs(abs(inner) ** 2 - linalg.cos2(f, g)) < 1e-9
    assert abs(np.linalg.norm(extalg.plucker(f).coords) - 1.0) < 1e-10


def test_hodge_sign_values():
    assert extalg.hodge_sign(0) == 1
    assert extalg.hodge_sign(0b1) == 1  # k=1, index sum 1 -> exponent even


@given(st.integers(min_value=0, max_value=(1 << 8) - 1))
@settings(max_examples=80, deadline=None)
def test_hodge_involution_sign(mask):
    d = 8
    k = bin(mask).count("1")
    comp = ((1 << d) - 1) ^ mask
    assert extalg.hodge_sign(mask) * extalg.hodge_sign(comp) == (-1) ** (k * (d - k))


def test_adjugate_identities():
    d = 4
    a = sc.standard_gaussian(Field.COMPLEX, (d, d), RNG)
    b = sc.standard_gaussian(Field.COMPLEX, (d, d), RNG)
    wa = extalg.wedge_operator(Operator(Field.COMPLEX, a))
    wb = extalg.wedge_operator(Operator(Field.COMPLEX, b))
    adj_a = extalg.adjugate(wa)
    eye = extalg.wedge_operator(Operator(Field.COMPLEX, np.eye(d, dtype=complex)))
    assert np.allclose(extalg.adjugate(eye).matrix, np.eye(1 << d))
    assert np.max(np.abs(adj_a.matrix @ wa.matrix
                         - np.linalg.det(a) * np.eye(1 << d))) < 1e-9
    # inverse route
    wainv = extalg.wedge_operator(Operator(Field.COMPLEX, np.linalg.inv(a)))
    assert np.max(np.abs(adj_a.matrix - np.linalg.det(a) * wainv.matrix)) < 1e-9
    # trace identity and antimorphism
    assert abs(np.trace(adj_a.matrix @ wb.matrix) - np.linalg.det(a + b)) < 1e-9
    lhs = extalg.adjugate(wa.compose(wb)).matrix
    rhs = extalg.adjugate(wb).matrix @ adj_a.matrix
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_density_operator_zero_kernel():
    k = Kernel(SplitSpace(Field.REAL, (1, 1, 1)), np.zeros((3, 3)))
    rho = extalg.density_operator(k).matrix
    expected = np.zeros((8, 8))
    expected[0, 0] = 1.0
    assert np.allclose(rho, expected)


def test_density_operator_projection_is_plucker_line():
    h = linalg.haar_frame(4, 2, Field.COMPLEX, RNG)
    k = Kernel(SplitSpace(Field.COMPLEX, (1,) * 4), linalg.projection(h).matrix)
    rho = extalg.density_operator(k).matrix
    omega = extalg.plucker(h).coords
    assert np.max(np.abs(rho - np.outer(omega, omega.conj()))) < 1e-10


def test_density_operator_properties_and_paths():
    k = random_kernel(Field.COMPLEX, 4, RNG)
    r1 = extalg.density_operator(k, method="adjugate").matrix
    r2 = extalg.density_operator(k, method="eigen").matrix
    assert np.max(np.abs(r1 - r2)) < 1e-10
    assert abs(np.trace(r1) - 1.0) < 1e-10
    assert np.min(np.linalg.eigvalsh(r1)) > -1e-10
    # diagonal in the eigenbasis: entries prod lam_I prod (1 - lam)_{I^c}
    lam, frame = linalg.hermitian_eig(Operator(k.field, k.matrix, hermitian=True))
    wu = extalg.wedge_operator(Operator(k.field, frame.matrix)).matrix
    diag = np.real(np.diag(wu.conj().T @ r1 @ wu))
    masks = np.arange(16)
    sel = ((masks[:, None] >> np.arange(4)[None, :]) & 1).astype(bool)
    expected = np.prod(np.where(sel, lam[None, :], 1 - lam[None, :]), axis=1)
    assert np.max(np.abs(diag - expected)) < 1e-9


def test_strata_projector():
    sp = SplitSpace(Field.REAL, (2, 1))
    pr = extalg.strata_projector(sp, (1, 0)).matrix
    expected_diag = np.zeros(8)
    expected_diag[0b001] = 1.0
    expected_diag[0b010] = 1.0
    assert np.allclose(np.diag(pr), expected_diag)
    total = sum(extalg.strata_projector(sp, nb).matrix for nb in splitspace.strata(sp))
    assert np.allclose(total, np.eye(8))
    zero = extalg.strata_projector(sp, (0, 0)).matrix
    assert zero[0, 0] == 1.0 and np.sum(zero) == 1.0


def test_dlp_prob_trace_routes():
    sp = SplitSpace(Field.COMPLEX, (2, 2))
    u = linalg.haar_unitary(4, Field.COMPLEX, RNG)
    k = Kernel(sp, sc.hermitize(Field.COMPLEX, (u * RNG.random(4)) @ u.conj().T))
    q = splitspace.sample_uniform_adapted(sp, (1, 1), RNG)
    v1 = extalg.dlp_prob_trace(k, q)
    v2 = linalg.schur_density(Operator(Field.COMPLEX, k.matrix, hermitian=True),
                              splitspace.join_frame(q))
    assert abs(v1 - v2) < 1e-9
    # k = projection on q gives density one at q
    kq = Kernel(sp, linalg.projection(splitspace.join_frame(q)).matrix)
    assert extalg.dlp_prob_trace(kq, q) == pytest.approx(1.0, abs=1e-9)


def test_generalized_trace_identity():
    sp = SplitSpace(Field.COMPLEX, (4,))
    u1 = linalg.haar_unitary(4, Field.COMPLEX, RNG)
    u2 = linalg.haar_unitary(4, Field.COMPLEX, RNG)
    k = Kernel(sp, sc.hermitize(Field.COMPLEX, (u1 * RNG.random(4)) @ u1.conj().T))
    l = Kernel(sp, sc.hermitize(Field.COMPLEX, (u2 * RNG.random(4)) @ u2.conj().T))
    lhs = np.trace(extalg.density_operator(k).matrix @ extalg.density_operator(l).matrix).real
    rhs = np.linalg.det(k.matrix @ l.matrix
                        + (np.eye(4) - k.matrix) @ (np.eye(4) - l.matrix)).real
    assert abs(lhs - rhs) < 1e-9


def test_support_masses_via_plucker_norms():
    from dlp import process

    sp = SplitSpace(Field.REAL, (2, 2))
    h = linalg.haar_frame(4, 2, Field.REAL, RNG)
    omega = extalg.plucker(h).coords
    masses = process.strata_masses(process.DlpModel.from_matrix(
        sp, linalg.projection(h).matrix))
    total = 0.0
    for nb, mass in masses.items():
        pr = extalg.strata_projector(sp, nb).matrix
        norm2 = float(np.real(omega @ pr @ omega))
        assert abs(mass - norm2) < 1e-9
        total += mass
    assert abs(total - 1.0) < 1e-9


def test_budget_and_field_guards():
    with pytest.raises(sc.BudgetError):
        extalg.wedge_operator(Operator(Field.REAL, np.eye(15)))
    with pytest.raises(ValueError):
        extalg.ExteriorOperator(Field.QUATERNION, 2, np.eye(4))
