import numpy as np
import pytest

from dlp import dpp, linalg, process, qsf
from dlp import scalars as sc
from dlp.harness import chi_square, mean_band
from dlp.scalars import Field

RNG = np.random.default_rng(707)


def test_graph_validation():
    with pytest.raises(ValueError):
        qsf.WeightedGraph(3, ((0, 0, 1.0),))
    with pytest.raises(ValueError):
        qsf.WeightedGraph(3, ((0, 1, -1.0),))
    with pytest.raises(ValueError):
        qsf.WeightedGraph(2, ((0, 3, 1.0),))
    g = qsf.WeightedGraph(4, ((0, 1, 1.0), (2, 3, 1.0)))
    assert not g.connected
    assert qsf.complete_graph(4).connected


def test_connection_validation():
    with pytest.raises(ValueError):
        qsf.Connection(Field.REAL, 2, (np.ones((2, 2)),))
    conn = qsf.trivial_connection(qsf.complete_graph(3), 2)
    assert len(conn.matrices) == 3


def test_twisted_derivative_single_edge():
    g = qsf.WeightedGraph(2, ((0, 1, 4.0),))
    d = qsf.twisted_derivative(g, qsf.trivial_connection(g, 1))
    assert np.allclose(d, np.array([[-2.0, 2.0]]))


def test_twisted_derivative_laplacian():
    g = qsf.complete_graph(3)
    d = qsf.twisted_derivative(g, qsf.trivial_connection(g, 1))
    lap = d.T @ d
    assert np.allclose(lap, np.array([[2.0, -1.0, -1.0],
                                      [-1.0, 2.0, -1.0],
                                      [-1.0, -1.0, 2.0]]))
    assert np.linalg.matrix_rank(d) == 2


def test_twisted_derivative_generic_cycle_full_rank():
    cyc = qsf.WeightedGraph(4, ((0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)))
    conn = qsf.sample_haar_connection(cyc, "unitary", 1, RNG)
    d = qsf.twisted_derivative(cyc, conn)
    assert np.linalg.matrix_rank(d) == 4


def test_star_space_dims():
    tree = qsf.WeightedGraph(4, ((0, 1, 1.0), (1, 2, 1.0), (1, 3, 2.0)))
    assert qsf.star_space(tree, qsf.trivial_connection(tree, 1)).n == 3
    k3 = qsf.complete_graph(3)
    assert qsf.star_space(k3, qsf.trivial_connection(k3, 1)).n == 2
    assert qsf.star_space(k3, qsf.trivial_connection(k3, 3)).n == 6
    conn = qsf.sample_haar_connection(k3, "unitary", 1, RNG)
    assert qsf.star_space(k3, conn).n == 3


def test_transfer_current_tree_and_k3():
    tree = qsf.WeightedGraph(3, ((0, 1, 1.0), (1, 2, 3.0)))
    k = qsf.transfer_current(tree)
    assert np.max(np.abs(k.matrix - np.eye(2))) < 1e-10
    k3 = qsf.transfer_current(qsf.complete_graph(3))
    assert np.max(np.abs(np.diag(k3.matrix) - 2.0 / 3.0)) < 1e-10
    with pytest.raises(ValueError):
        qsf.transfer_current(qsf.WeightedGraph(4, ((0, 1, 1.0), (2, 3, 1.0))))


def test_transfer_current_marginals_sampled():
    g, _ = qsf.grid_graph(3, 2)
    k = qsf.transfer_current(g)
    model = process.DlpModel(k.space, k)
    rows = process.sample_strata(model, 20000, RNG)
    mean, se = mean_band(rows.astype(float))
    diag = np.diag(k.matrix)
    assert np.max(np.abs(mean - diag) / se) < 4.0


def test_ust_samples_are_spanning_trees():
    g, _ = qsf.grid_graph(4, 3)
    k = qsf.transfer_current(g)
    model = process.DlpModel(k.space, k)
    rows = process.sample_strata(model, 2000, RNG)
    assert all(qsf.is_spanning_tree(g, row) for row in rows)


def test_k3_tree_uniformity():
    k3 = qsf.complete_graph(3)
    k = qsf.transfer_current(k3)
    model = process.DlpModel(k.space, k)
    rows = process.sample_strata(model, 30000, RNG)
    missing = np.argmin(rows, axis=1)
    assert chi_square(np.bincount(missing, minlength=3), np.full(3, 1 / 3)) > 0.001


def test_haar_connection_properties():
    g = qsf.complete_graph(3)
    signs = qsf.sample_haar_connection(g, "orthogonal", 1, RNG)
    for h in signs.matrices:
        assert abs(abs(h[0, 0]) - 1.0) < 1e-12
    phases = qsf.sample_haar_connection(g, "unitary", 1, RNG)
    for h in phases.matrices:
        assert abs(abs(h[0, 0]) - 1.0) < 1e-12
    big = qsf.sample_haar_connection(g, "orthogonal", 3, RNG)
    for h in big.matrices:
        assert np.max(np.abs(h.T @ h - np.eye(3))) < 1e-10
    with pytest.raises(ValueError):
        qsf.sample_haar_connection(g, "special", 1, RNG)


def test_rank_n_edge_occupation_scaling():
    k3 = qsf.complete_graph(3)
    model = qsf.qsf_model(k3, qsf.trivial_connection(k3, 2))
    rows = process.sample_strata(model, 20000, RNG).astype(float)
    mean, se = mean_band(rows)
    assert np.max(np.abs(mean - 2 * (2.0 / 3.0)) / se) < 4.0


def test_quaternion_cycle_model():
    cyc = qsf.WeightedGraph(4, ((0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0), (0, 3, 4.0)))
    model = qsf.qsf_model(cyc, qsf.trivial_connection(cyc, 1, Field.QUATERNION))
    table = dpp.density_table(model.kernel)
    assert table.sum() == pytest.approx(1.0, abs=1e-9)
    # support is the four spanning trees (drop one edge each)
    support = {m for m in range(16) if table[m] > 1e-10}
    assert support == {0b1111 ^ (1 << e) for e in range(4)}
    rows = process.sample_strata(model, 20000, RNG)
    masks = rows @ (1 << np.arange(4))
    assert chi_square(np.bincount(masks, minlength=16), table / table.sum()) > 0.001


def test_qsf_mean_projection_is_transfer_current():
    k3 = qsf.complete_graph(3)
    k = qsf.transfer_current(k3)
    space = k.space
    star = qsf.star_space(k3, qsf.trivial_connection(k3, 1))
    mean, se = process.mean_projection_estimate(space, star, 5000, RNG)
    diff = np.abs(mean.matrix - k.matrix)
    assert np.max(diff / (se[..., 0] + 1e-12)) < 5.0


def test_render_svg_tree_and_legend():
    g, layout = qsf.grid_graph(3, 3)
    k = qsf.transfer_current(g)
    model = process.DlpModel(k.space, k)
    sample = process.sample(model, np.random.default_rng(11))
    svg = qsf.render_svg(g, sample, layout)
    assert svg.startswith('<?xml version="1.0"')
    assert '<svg xmlns="http://www.w3.org/2000/svg" version="1.1"' in svg
    # 8 tree edges at full stroke plus the level-1 legend swatch
    assert svg.count('stroke-width="4.00"') == 9
    assert qsf.is_spanning_tree(g, qsf.edge_occupancy(sample))
    # rank-3 legend shows 4 levels
    conn3 = qsf.trivial_connection(g, 3)
    sample3 = qsf.sample_qsf(g, conn3, np.random.default_rng(12))
    svg3 = qsf.render_svg(g, sample3, layout)
    assert all(f">{lev}</text>" in svg3 for lev in range(4))


def test_render_svg_empty_and_determinism():
    g, layout = qsf.grid_graph(2, 2)
    empty = (0, 0, 0, 0)
    svg = qsf.render_svg(g, empty, layout)
    assert svg.count('stroke-width="0.60"') >= 4  # all edges faint
    sample = qsf.sample_qsf(g, qsf.trivial_connection(g, 1), np.random.default_rng(5))
    assert qsf.render_svg(g, sample, layout) == qsf.render_svg(g, sample, layout)
    with pytest.raises(ValueError):
        qsf.render_svg(g, empty, None)
