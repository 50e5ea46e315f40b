"""Verification suites: one statistical or exact case per testable claim.

Thresholds follow one policy: exact identities at 1e-9 (or the stated
tighter/looser bound), Monte-Carlo means within 4-5 standard errors,
distributional tests at chi-square p > 0.001.
"""

from __future__ import annotations

import math

import numpy as np

from . import dpp, extalg, linalg, process, qsf, splitspace
from . import scalars as sc
from .dpp import Kernel
from .harness import CaseResult, chi_square, mean_band, two_sample_chi_square
from .linalg import Frame, Operator
from .process import DlpModel
from .scalars import Field
from .splitspace import SplitSpace

__all__ = ["SUITES"]


# ---------------------------------------------------------------------------
# Instance generators and small helpers.
# ---------------------------------------------------------------------------

def _case(statistic, threshold, comparison, note="") -> CaseResult:
    ok = statistic <= threshold if comparison == "<=" else statistic >= threshold
    return CaseResult("", float(statistic), float(threshold), comparison, bool(ok), note=note)


def _random_contraction(field: Field, d: int, rng) -> np.ndarray:
    u = linalg.haar_unitary(d, field, rng)
    lam = rng.random(d)
    m = sc.mat_mul(field, sc.scal_mul(field, lam[None, :], u), sc.adjoint(field, u))
    return sc.hermitize(field, m)


def _random_projection(field: Field, d: int, rank: int, rng) -> Frame:
    return linalg.haar_frame(d, rank, field, rng)


def _model(field: Field, dims, matrix) -> DlpModel:
    return DlpModel.from_matrix(SplitSpace(field, dims), matrix)


def _random_model(field: Field, dims, rng) -> DlpModel:
    return _model(field, dims, _random_contraction(field, sum(dims), rng))


MIXED_SPLITTINGS_D5 = [(2, 2, 1), (3, 2), (1, 1, 1, 1, 1), (2, 1, 2), (4, 1),
                       (1, 3, 1), (5,), (2, 3), (1, 1, 3), (1, 4)]


def _stratum_strides(space: SplitSpace) -> np.ndarray:
    sizes = [d + 1 for d in space.block_dims]
    strides = np.ones(len(sizes), dtype=np.int64)
    for i in range(len(sizes) - 2, -1, -1):
        strides[i] = strides[i + 1] * sizes[i + 1]
    return strides


def _strata_hist(space: SplitSpace, rows: np.ndarray) -> np.ndarray:
    """Counts aligned with the lexicographic stratum enumeration."""
    strides = _stratum_strides(space)
    idx = rows @ strides
    total = int(np.prod([d + 1 for d in space.block_dims]))
    return np.bincount(idx, minlength=total)


def _mass_vector(space: SplitSpace, masses: dict) -> np.ndarray:
    return np.array([masses[nb] for nb in splitspace.strata(space)])


def _strata_chi_square(model: DlpModel, rows: np.ndarray) -> float:
    probs = _mass_vector(model.space, process.strata_masses(model))
    counts = _strata_hist(model.space, rows)
    return chi_square(counts, probs / probs.sum())


# ---------------------------------------------------------------------------
# Suite: dpp-core.
# ---------------------------------------------------------------------------

def _dpp_instances(rng):
    for i in range(20):
        field = Field.REAL if i % 2 == 0 else Field.COMPLEX
        space = SplitSpace(field, (1, 1, 1, 1))
        yield Kernel(space, _random_contraction(field, 4, rng))


def dpp_normalization(rng, cfg):
    worst = max(abs(dpp.density_table(k).sum() - 1.0) for k in _dpp_instances(rng))
    return _case(worst, 1e-9, "<=", "sum of 2^d subset densities vs 1, 20 kernels")


def dpp_mobius(rng, cfg):
    worst = 0.0
    for k in _dpp_instances(rng):
        table = dpp.density_table(k)
        worst = max(worst, float(np.max(np.abs(dpp.mobius_invert(dpp.incidence_table(k)) - table))))
    return _case(worst, 1e-9, "<=", "inclusion-exclusion of incidence vs direct density")


def dpp_sampler(rng, cfg):
    n = cfg.samples(200000)
    worst = 1.0
    for k in _dpp_instances(rng):
        taken = dpp.sample_recursive_batch(np.broadcast_to(k.matrix, (n,) + k.matrix.shape), rng)
        masks = taken @ (1 << np.arange(k.d))
        counts = np.bincount(masks, minlength=1 << k.d)
        worst = min(worst, chi_square(counts, dpp.density_table(k)))
    return _case(worst, 0.001, ">=", f"min chi-square p over 20 kernels, n={n}")


# ---------------------------------------------------------------------------
# Suite: quaternion.
# ---------------------------------------------------------------------------

def quat_qdet_square(rng, cfg):
    worst = 0.0
    for i in range(50):
        d = 2 + i % 5
        g = sc.standard_gaussian(Field.QUATERNION, (d, d), rng) / 2.0
        k = sc.hermitize(Field.QUATERNION, g)
        worst = max(worst, abs(sc.qdet(k) ** 2 - np.linalg.det(sc.complexify(k)).real))
    return _case(worst, 1e-9, "<=", "Moore determinant squared vs complexified determinant")


def _random_quat_projection_matrix(d, rank, rng):
    f = linalg.haar_frame(d, rank, Field.QUATERNION, rng)
    return linalg.projection(f).matrix


def quat_dyson_identity(rng, cfg):
    worst = 0.0
    for trial in range(20):
        d = 3 + trial % 4
        rank = 1 + trial % (d - 1)
        m = _random_quat_projection_matrix(d, rank, rng)
        k = 1 + trial % 3
        multiset = tuple(int(x) for x in rng.integers(0, d, size=k - 1))
        sub = m[np.ix_(multiset, multiset)]
        base = sc.tau_det(sub, field=Field.QUATERNION)
        total = 0.0
        for last in range(d):
            idx = multiset + (last,)
            total += sc.tau_det(m[np.ix_(idx, idx)], field=Field.QUATERNION)
        worst = max(worst, abs(total - (rank - k + 1) * base))
    return _case(worst, 1e-9, "<=", "one-index extension sum vs (Tr - k + 1) times the minor")


def quat_dyson_falling_factorial(rng, cfg):
    worst = 0.0
    for trial in range(8):
        d = 4 + trial % 3
        rank = 1 + trial % d
        m = _random_quat_projection_matrix(d, rank, rng)
        for n in (1, 2, 3):
            total = 0.0
            for flat in range(d ** n):
                idx = tuple((flat // d ** j) % d for j in range(n))
                total += sc.tau_det(m[np.ix_(idx, idx)], field=Field.QUATERNION)
            expect = math.prod(rank - j for j in range(n))
            worst = max(worst, abs(total - expect))
    return _case(worst, 1e-9, "<=", "multiset minor sums vs falling factorial of the rank")


def quat_dpp_normalization(rng, cfg):
    worst = 0.0
    for d in (3, 4):
        space = SplitSpace(Field.QUATERNION, (1,) * d)
        k = Kernel(space, _random_contraction(Field.QUATERNION, d, rng))
        worst = max(worst, abs(dpp.density_table(k).sum() - 1.0))
        rank = 1 + d % 2
        kp = Kernel(space, _random_quat_projection_matrix(d, rank, rng))
        fixed = sum(dpp.incidence_prob(kp, m) for m in range(1 << d)
                    if bin(m).count("1") == rank)
        worst = max(worst, abs(fixed - 1.0))
    return _case(worst, 1e-9, "<=", "quaternion subset densities and fixed-size minors sum to 1")


# ---------------------------------------------------------------------------
# Suite: density-consistency.
# ---------------------------------------------------------------------------

def density_three_routes(rng, cfg):
    splittings = [(1, 1, 1), (2, 2), (3, 2), (2, 1, 2), (1, 1, 1, 1), (4, 2)]
    worst = 0.0
    for i in range(100):
        field = Field.REAL if i % 2 == 0 else Field.COMPLEX
        dims = splittings[i % len(splittings)]
        model = _random_model(field, dims, rng)
        nbar = tuple(int(rng.integers(0, d + 1)) for d in dims)
        q = splitspace.sample_uniform_adapted(model.space, nbar, rng)
        frame = splitspace.join_frame(q)
        pq = linalg.projection(frame).matrix
        pperp = sc.eye(field, model.d) - pq
        k = model.kernel.matrix
        v_sym = float(np.linalg.det(k @ pq + (sc.eye(field, model.d) - k) @ pperp).real)
        v_herm = float(np.linalg.det(k - pperp).real)
        v_herm = v_herm if (model.d - frame.n) % 2 == 0 else -v_herm
        v_trace = extalg.dlp_prob_trace(model.kernel, q)
        worst = max(worst, abs(v_sym - v_herm), abs(v_sym - v_trace), abs(v_herm - v_trace))
    return _case(worst, 1e-9, "<=", "symmetric vs Hermitian vs exterior-trace density, 100 pairs")


# ---------------------------------------------------------------------------
# Suite: sampler-law.
# ---------------------------------------------------------------------------

def _sampler_models(rng):
    out = []
    for i, dims in enumerate(MIXED_SPLITTINGS_D5):
        field = Field.REAL if i % 2 == 0 else Field.COMPLEX
        out.append(_random_model(field, dims, rng))
    return out


def sampler_strata_law(rng, cfg):
    n = cfg.samples(100000)
    worst = 1.0
    for model in _sampler_models(rng):
        rows = process.sample_strata(model, n, rng)
        worst = min(worst, _strata_chi_square(model, rows))
    return _case(worst, 0.001, ">=", f"min chi-square p, direct sampler vs exact masses, n={n}")


def sampler_vs_mixture(rng, cfg):
    n = cfg.samples(100000)
    worst = 1.0
    for model in _sampler_models(rng):
        h1 = _strata_hist(model.space, process.sample_strata(model, n, rng))
        h2 = _strata_hist(model.space, process.sample_strata_via_mixture(model, n, rng))
        worst = min(worst, two_sample_chi_square(h1, h2))
    return _case(worst, 0.001, ">=", f"min two-sample chi-square p, direct vs mixture, n={n}")


def sampler_laplace(rng, cfg):
    n = cfg.samples(100000)
    worst = 0.0
    for model in _sampler_models(rng):
        rows = process.sample_strata(model, n, rng)
        for _ in range(5):
            t = rng.uniform(-0.6, 0.6, model.space.n_blocks)
            vals = np.exp(rows @ t)
            mean, se = mean_band(vals)
            exact = process.laplace_transform(model, t)
            worst = max(worst, abs(mean - exact) / max(se, 1e-300))
    return _case(worst, 4.0, "<=", f"max |MGF - det formula| in standard errors, 5 points/model, n={n}")


def sampler_quaternion_strata(rng, cfg):
    n = cfg.samples(100000)
    worst = 0.0
    for dims in ((2, 2), (1, 2, 1)):
        model = _random_model(Field.QUATERNION, dims, rng)
        rows = process.sample_strata(model, n, rng)
        counts = _strata_hist(model.space, rows)
        probs = _mass_vector(model.space, process.strata_masses(model))
        freq = counts / n
        se = np.sqrt(np.maximum(probs * (1 - probs), 1e-300) / n)
        worst = max(worst, float(np.max(np.abs(freq - probs) / se)))
    return _case(worst, 4.0, "<=",
                 f"max stratum-frequency deviation in SEs vs Laplace coefficients, n={n}")


# ---------------------------------------------------------------------------
# Suite: projection-geometry.
# ---------------------------------------------------------------------------

def _screened_projection(field: Field, space: SplitSpace, rank: int, rng,
                         min_mass: float = 5e-3, tries: int = 40):
    """Random subspace whose projection model gives every dimension-matching
    stratum at least ``min_mass``, so empirical error bars on stratum-bound
    statistics are meaningful at desk-scale sample counts."""
    for _ in range(tries):
        cand = _random_projection(field, space.dim, rank, rng)
        masses = process.strata_masses(
            DlpModel.from_matrix(space, linalg.projection(cand).matrix))
        active = [v for nb, v in masses.items() if sum(nb) == rank]
        if min(active) >= min_mass:
            return cand
    return None


def _transversality_failures(model: DlpModel, h: Frame, n: int, rng) -> int:
    frames = process.sample_frames_projection(model, n, rng)
    field = model.field
    hq = sc.mat_mul(field, sc.adjoint(field, h.matrix)[None], frames) \
        if field is Field.QUATERNION else np.conj(h.matrix.T)[None] @ frames
    flat = sc.complexify(hq) if field is Field.QUATERNION else hq
    dets = np.linalg.det(flat)
    return int(np.sum(np.abs(dets) <= process.TRANSVERSALITY_TOL))


def projection_uniqueness(rng, cfg):
    n = cfg.samples(10000)
    failures = 0
    for field, dims, rank in ((Field.REAL, (1, 1, 1, 1), 2), (Field.COMPLEX, (2, 2), 2),
                              (Field.QUATERNION, (1, 1, 1), 2)):
        space = SplitSpace(field, dims)
        h = _random_projection(field, sum(dims), rank, rng)
        model = DlpModel.from_matrix(space, linalg.projection(h).matrix)
        failures += _transversality_failures(model, h, n, rng)
    return _case(failures, 0, "<=", f"transversality failures over 3 x {n} draws")


def projection_mean(rng, cfg):
    n = cfg.samples(20000)
    worst = 0.0
    for field, dims, rank in ((Field.REAL, (1, 1, 1), 2), (Field.COMPLEX, (2, 1), 2),
                              (Field.QUATERNION, (1, 1, 1), 2)):
        space = SplitSpace(field, dims)
        h = _screened_projection(field, space, rank, rng)
        if h is None:
            return _case(1.0, 0.0, "<=", "no instance with well-covered strata found")
        mean, se = process.mean_projection_estimate(space, h, n, rng)
        target = linalg.projection(h).matrix
        if field is Field.QUATERNION:
            est = (mean.matrix + sc.adjoint(field, mean.matrix)) / 2.0
            diff = np.abs(est - target)
        else:
            est = mean.matrix
            diff = np.abs(process._coeff_stack(field, est - target))
        worst = max(worst, float(np.max(diff / (se + 1e-12))))
    return _case(worst, 5.0, "<=", f"max |mean oblique projector - target| in SEs, n={n}")


def projection_wedge_exact(rng, cfg):
    """Finite enumeration of the minor-wise mean-projection identity on a
    splitting in lines, where the process has 2^d atoms."""
    worst = 0.0
    for field in (Field.REAL, Field.COMPLEX):
        d, rank = 4, 2
        space = SplitSpace(field, (1,) * d)
        h = _random_projection(field, d, rank, rng)
        k = Kernel(space, linalg.projection(h).matrix)
        table = dpp.density_table(k)
        acc = np.zeros((1 << d, 1 << d), dtype=complex)
        eye = np.eye(d, dtype=complex)
        for m in range(1 << d):
            if table[m] < 1e-13:
                continue
            cols = [i for i in range(d) if (m >> i) & 1]
            q = eye[:, cols]
            p = q @ np.linalg.solve(np.conj(h.matrix.T) @ q, np.conj(h.matrix.T))
            acc += table[m] * extalg.wedge_operator_batch(p[None], Field.COMPLEX)[0]
        target = extalg.wedge_operator_batch(
            linalg.projection(h).matrix.astype(complex)[None], Field.COMPLEX)[0]
        worst = max(worst, float(np.max(np.abs(acc - target))))
    return _case(worst, 1e-9, "<=", "exact minor-wise mean projector on splittings in lines")


def projection_wedge_mc(rng, cfg):
    n = cfg.samples(20000)
    worst = 0.0
    for field, dims, rank in ((Field.REAL, (2, 2), 2), (Field.COMPLEX, (2, 2, 1), 2)):
        space = SplitSpace(field, dims)
        h = _screened_projection(field, space, rank, rng)
        if h is None:
            return _case(1.0, 0.0, "<=", "no instance with well-covered strata found")
        mean, se = process.mean_wedge_estimate(space, h, n, rng)
        target = extalg.wedge_operator(
            Operator(field, linalg.projection(h).matrix)).matrix
        diff = np.abs(process._coeff_stack(Field.COMPLEX, mean.astype(complex) - target.astype(complex)))
        worst = max(worst, float(np.max(diff / (5.0 * se + 1e-9))))
    return _case(worst, 1.0, "<=", f"max minor deviation over 5 SE + 1e-9, n={n}")


def projection_matroid_support(rng, cfg):
    mismatches = 0
    splittings = [(1, 1, 1, 1), (2, 2), (2, 1, 1), (3, 2), (1, 2, 1)]
    for i in range(20):
        field = Field.REAL if i % 2 == 0 else Field.COMPLEX
        dims = splittings[i % len(splittings)]
        d = sum(dims)
        rank = 1 + i % (d - 1)
        space = SplitSpace(field, dims)
        h = _random_projection(field, d, rank, rng)
        support = process.matroid_support(space, h)
        masses = process.strata_masses(DlpModel.from_matrix(space, linalg.projection(h).matrix))
        positive = {nb for nb, v in masses.items() if v > 1e-9}
        if support != positive:
            mismatches += 1
    return _case(mismatches, 0, "<=", "matroid inequalities vs positive-mass strata, 20 subspaces")


# ---------------------------------------------------------------------------
# Suite: transforms.
# ---------------------------------------------------------------------------

def _transform_models(rng):
    out = []
    for i, dims in enumerate(MIXED_SPLITTINGS_D5[:5]):
        field = Field.REAL if i % 2 == 0 else Field.COMPLEX
        out.append(_random_model(field, dims, rng))
    return out


def transform_orthocomplement(rng, cfg):
    n = cfg.samples(100000)
    worst = 1.0
    for model in _transform_models(rng):
        rows = process.sample_strata(model, n, rng)
        comp_rows = np.array(model.space.block_dims)[None, :] - rows
        comp = process.complement_model(model)
        worst = min(worst, _strata_chi_square(comp, comp_rows))
    return _case(worst, 0.001, ">=", f"min chi-square p, complemented draws vs kernel 1-k, n={n}")


def transform_scaling(rng, cfg):
    n = cfg.samples(100000)
    worst = 1.0
    for model in _transform_models(rng):
        rows = process.sample_strata(model, n, rng)
        for p in (0.3, 0.7):
            thinned = rng.binomial(rows, p)
            scaled = process.scale_model(model, p)
            worst = min(worst, _strata_chi_square(scaled, thinned))
    return _case(worst, 0.001, ">=",
                 f"min chi-square p, blockwise thinned draws vs kernel p*k, p in (0.3, 0.7), n={n}")


def transform_restriction(rng, cfg):
    n = cfg.samples(100000)
    worst = 1.0
    for model in _transform_models(rng):
        s = model.space.n_blocks
        if s < 2:
            continue
        t = max(1, s // 2)
        rows = process.sample_strata(model, n, rng)
        sub = process.restrict(model, t)
        worst = min(worst, _strata_chi_square(sub, rows[:, :t]))
    return _case(worst, 0.001, ">=",
                 f"min chi-square p, first-block draws vs compressed kernel, n={n}")


# ---------------------------------------------------------------------------
# Suite: inequalities.
# ---------------------------------------------------------------------------

def negative_association(rng, cfg):
    n = cfg.samples(100000)
    worst = -np.inf
    for i in range(10):
        dims = MIXED_SPLITTINGS_D5[i % len(MIXED_SPLITTINGS_D5)]
        if len(dims) < 2:
            dims = (2, 3)
        field = Field.REAL if i % 2 == 0 else Field.COMPLEX
        model = _random_model(field, dims, rng)
        r = 1 + i % (len(dims) - 1)
        rows = process.sample_strata(model, n, rng)
        f = rows[:, :r].sum(axis=1).astype(float)
        g = rows[:, r:].sum(axis=1).astype(float)
        cov = f @ g / n - f.mean() * g.mean()
        centered = (f - f.mean()) * (g - g.mean())
        se = centered.std(ddof=1) / math.sqrt(n)
        worst = max(worst, cov / max(se, 1e-300))
    return _case(worst, 4.0, "<=",
                 f"max covariance of dim(Q∩R), dim(Q∩R⊥) in SEs (should be <= 0), n={n}")


def stochastic_domination(rng, cfg):
    n = cfg.samples(100000)
    worst = -np.inf
    for i in range(10):
        dims = MIXED_SPLITTINGS_D5[i % len(MIXED_SPLITTINGS_D5)]
        field = Field.REAL if i % 2 == 0 else Field.COMPLEX
        d = sum(dims)
        k2 = _random_contraction(field, d, rng)
        if i % 2 == 0:
            k1 = float(rng.uniform(0.2, 0.95)) * k2
        else:
            lam, u = np.linalg.eigh(k2)
            sqrt_k2 = (u * np.sqrt(np.maximum(lam, 0.0))) @ np.conj(u.T)
            k1 = sc.hermitize(field, sqrt_k2 @ _random_contraction(field, d, rng) @ sqrt_k2)
        m1 = _model(field, dims, k1)
        m2 = _model(field, dims, k2)
        rows1 = process.sample_strata(m1, n, rng).astype(float)
        rows2 = process.sample_strata(m2, n, rng).astype(float)
        mean1, se1 = mean_band(rows1)
        mean2, se2 = mean_band(rows2)
        z = (mean1 - mean2) / np.sqrt(se1 ** 2 + se2 ** 2 + 1e-300)
        worst = max(worst, float(np.max(z)))
    return _case(worst, 4.0, "<=",
                 f"max per-block mean-dimension excess of the dominated model in SEs, n={n}")


def fischer_inequality(rng, cfg):
    worst = -np.inf
    for i in range(100):
        field = Field.REAL if i % 2 == 0 else Field.COMPLEX
        d = 4 + i % 3
        g = sc.standard_gaussian(field, (d, d), rng)
        k = sc.hermitize(field, sc.mat_mul(field, g, sc.adjoint(field, g))) / d
        perm = rng.permutation(d)
        cut = 1 + int(rng.integers(1, d - 1))
        r1, r2 = np.sort(perm[:cut]), np.sort(perm[cut:])
        both = np.sort(perm)
        excess = np.linalg.det(k[np.ix_(both, both)]).real \
            - np.linalg.det(k[np.ix_(r1, r1)]).real * np.linalg.det(k[np.ix_(r2, r2)]).real
        worst = max(worst, float(excess))
    return _case(worst, 1e-12, "<=", "max det K^{R1⊕R2} - det K^{R1} det K^{R2} over 100 PSD draws")


# ---------------------------------------------------------------------------
# Suite: qsf.
# ---------------------------------------------------------------------------

def qsf_k3_uniform(rng, cfg):
    n = cfg.samples(100000)
    k3 = qsf.complete_graph(3)
    model = process.DlpModel(qsf.transfer_current(k3).space, qsf.transfer_current(k3))
    rows = process.sample_strata(model, n, rng)
    missing = np.argmin(rows, axis=1)
    counts = np.bincount(missing, minlength=3)
    p = chi_square(counts, np.full(3, 1 / 3))
    return _case(p, 0.001, ">=", f"chi-square p of the 3 spanning trees vs uniform, n={n}")


def qsf_k3_transfer(rng, cfg):
    tc = qsf.transfer_current(qsf.complete_graph(3))
    worst = float(np.max(np.abs(np.diag(tc.matrix) - 2.0 / 3.0)))
    return _case(worst, 1e-10, "<=", "transfer-current diagonal vs 2/3 on the triangle")


def qsf_grid_trees(rng, cfg):
    n = cfg.samples(10000)
    g, _ = qsf.grid_graph(5, 5)
    tc = qsf.transfer_current(g)
    model = process.DlpModel(tc.space, tc)
    rows = process.sample_strata(model, n, rng, chunk=2500)
    failures = sum(0 if qsf.is_spanning_tree(g, row) else 1 for row in rows)
    return _case(failures, 0, "<=", f"non-spanning or cyclic draws on the 5x5 grid over {n}")


def qsf_rank3_occupation(rng, cfg):
    n = cfg.samples(100000)
    k3 = qsf.complete_graph(3)
    model = qsf.qsf_model(k3, qsf.trivial_connection(k3, 3))
    rows = process.sample_strata(model, n, rng).astype(float)
    mean, se = mean_band(rows)
    z = np.abs(mean - 3.0 * (2.0 / 3.0)) / se
    return _case(float(np.max(z)), 4.0, "<=",
                 f"edge occupation means vs rank x tree marginal in SEs, n={n}")


def qsf_quaternion_cycle(rng, cfg):
    n = cfg.samples(100000)
    cycle = qsf.WeightedGraph(4, ((0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0), (0, 3, 4.0)))
    model = qsf.qsf_model(cycle, qsf.trivial_connection(cycle, 1, Field.QUATERNION))
    table = dpp.density_table(model.kernel)
    rows = process.sample_strata(model, n, rng)
    masks = rows @ (1 << np.arange(4))
    counts = np.bincount(masks, minlength=16)
    p = chi_square(counts, table / table.sum())
    return _case(p, 0.001, ">=",
                 f"chi-square p of quaternion forest draws vs Moore-determinant table, n={n}")


def qsf_quaternion_cycle_haar(rng, cfg):
    """With generic holonomy the twisted forms fill edge space and the forest
    is deterministically everything; check sampler and table agree on that."""
    n = cfg.samples(2000)
    cycle = qsf.WeightedGraph(4, ((0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)))
    conn = qsf.sample_haar_connection(cycle, "symplectic", 1, rng)
    model = qsf.qsf_model(cycle, conn)
    table = dpp.density_table(model.kernel)
    rows = process.sample_strata(model, n, rng)
    bad = int(np.sum(rows.sum(axis=1) != 4)) + int(abs(table[15] - 1.0) > 1e-9)
    return _case(bad, 0, "<=", f"degenerate full-forest law under Haar holonomy, n={n}")


# ---------------------------------------------------------------------------
# Suite: restriction-of-scalars.
# ---------------------------------------------------------------------------

def _convolve_masses(space_small: SplitSpace, masses: dict, space_big: SplitSpace) -> np.ndarray:
    out = {nb: 0.0 for nb in splitspace.strata(space_big)}
    for a, va in masses.items():
        for b, vb in masses.items():
            key = tuple(x + y for x, y in zip(a, b))
            out[key] += va * vb
    return np.array([out[nb] for nb in splitspace.strata(space_big)])


def scalars_complex_to_real(rng, cfg):
    n = cfg.samples(100000)
    model = _random_model(Field.COMPLEX, (2, 2), rng)
    masses = process.strata_masses(model)
    big_space, big_matrix = splitspace.restrict_scalars(model.space, model.kernel.matrix)
    big = DlpModel.from_matrix(big_space, big_matrix)
    probs = _convolve_masses(model.space, masses, big_space)
    rows = process.sample_strata(big, n, rng)
    counts = _strata_hist(big_space, rows)
    p = chi_square(counts, probs / probs.sum())
    return _case(p, 0.001, ">=",
                 f"chi-square p, real restriction vs convolution of two complex laws, n={n}")


def scalars_quaternion_to_complex(rng, cfg):
    n = cfg.samples(100000)
    model = _random_model(Field.QUATERNION, (2, 1), rng)
    masses = process.strata_masses(model)
    big_space, big_matrix = splitspace.restrict_scalars(model.space, model.kernel.matrix)
    big = DlpModel.from_matrix(big_space, big_matrix)
    probs = _convolve_masses(model.space, masses, big_space)
    rows = process.sample_strata(big, n, rng)
    counts = _strata_hist(big_space, rows)
    p = chi_square(counts, probs / probs.sum())
    return _case(p, 0.001, ">=",
                 f"chi-square p, complex restriction vs convolution of two quaternion laws, n={n}")


SUITES = {
    "dpp-core": [
        ("normalization", dpp_normalization),
        ("mobius-roundtrip", dpp_mobius),
        ("recursive-sampler", dpp_sampler),
    ],
    "quaternion": [
        ("qdet-square", quat_qdet_square),
        ("dyson-identity", quat_dyson_identity),
        ("dyson-falling-factorial", quat_dyson_falling_factorial),
        ("qdpp-normalization", quat_dpp_normalization),
    ],
    "density-consistency": [
        ("three-route-density", density_three_routes),
    ],
    "sampler-law": [
        ("strata-vs-masses", sampler_strata_law),
        ("direct-vs-mixture", sampler_vs_mixture),
        ("laplace-mgf", sampler_laplace),
        ("quaternion-strata", sampler_quaternion_strata),
    ],
    "projection-geometry": [
        ("uniqueness-transversality", projection_uniqueness),
        ("mean-projection", projection_mean),
        ("wedge-exact-lines", projection_wedge_exact),
        ("wedge-mean-mc", projection_wedge_mc),
        ("matroid-support", projection_matroid_support),
    ],
    "transforms": [
        ("orthocomplement", transform_orthocomplement),
        ("scaling", transform_scaling),
        ("restriction", transform_restriction),
    ],
    "inequalities": [
        ("negative-association", negative_association),
        ("stochastic-domination", stochastic_domination),
        ("fischer", fischer_inequality),
    ],
    "qsf": [
        ("k3-tree-uniformity", qsf_k3_uniform),
        ("k3-transfer-current", qsf_k3_transfer),
        ("grid-ust-trees", qsf_grid_trees),
        ("rank3-edge-occupation", qsf_rank3_occupation),
        ("quaternion-cycle", qsf_quaternion_cycle),
        ("quaternion-cycle-haar", qsf_quaternion_cycle_haar),
    ],
    "restriction-of-scalars": [
        ("complex-to-real", scalars_complex_to_real),
        ("quaternion-to-complex", scalars_quaternion_to_complex),
    ],
}
