import json
import os
import subprocess
import sys

import numpy as np
import pytest

from dlp import encoding, linalg, process, qsf
from dlp import scalars as sc
from dlp.process import DlpModel
from dlp.scalars import Field
from dlp.splitspace import SplitSpace

RNG = np.random.default_rng(808)


def random_model(field, dims, rng):
    sp = SplitSpace(field, dims)
    d = sp.dim
    u = linalg.haar_unitary(d, field, rng)
    m = sc.mat_mul(field, sc.scal_mul(field, rng.random(d)[None, :], u),
                   sc.adjoint(field, u))
    return DlpModel.from_matrix(sp, sc.hermitize(field, m))


@pytest.mark.parametrize("field,dims", [
    (Field.REAL, (2, 1)), (Field.COMPLEX, (2, 2)), (Field.QUATERNION, (1, 2)),
])
def test_model_json_roundtrip(field, dims):
    model = random_model(field, dims, RNG)
    data = json.loads(json.dumps(encoding.model_to_json(model)))
    back = encoding.model_from_json(data)
    assert back.space == model.space
    assert sc.max_abs(field, back.kernel.matrix - model.kernel.matrix) < 1e-9


def test_kernel_json_roundtrip():
    model = random_model(Field.QUATERNION, (2,), RNG)
    data = encoding.kernel_to_json(model.kernel)
    assert data["field"] == "quaternion" and data["blocks"] == [2]
    back = encoding.kernel_from_json(json.loads(json.dumps(data)))
    assert sc.max_abs(Field.QUATERNION, back.matrix - model.kernel.matrix) < 1e-9


def test_scalar_encodings():
    assert encoding.encode_matrix(Field.REAL, np.array([[1.5]])) == [[1.5]]
    assert encoding.encode_matrix(Field.COMPLEX, np.array([[1 + 2j]])) == [[[1.0, 2.0]]]
    q = np.zeros((1, 1, 4))
    q[0, 0] = [1, 2, 3, 4]
    assert encoding.encode_matrix(Field.QUATERNION, q) == [[[1.0, 2.0, 3.0, 4.0]]]


def test_sample_json_roundtrip():
    model = random_model(Field.COMPLEX, (2, 2), RNG)
    s = process.sample(model, RNG)
    data = json.loads(json.dumps(encoding.sample_to_json(s)))
    sub = encoding.subspace_from_json(model.space, data["block_frames"])
    assert sub.stratum == s.subspace.stratum
    assert process.dlp_density(model, sub) == pytest.approx(data["density"], abs=1e-8)


def test_sample_json_roundtrip_with_empty_block():
    sp = SplitSpace(Field.COMPLEX, (2, 2))
    model = DlpModel.from_matrix(sp, np.zeros((4, 4), dtype=complex))
    s = process.sample(model, RNG)  # zero kernel: every block frame is empty
    data = json.loads(json.dumps(encoding.sample_to_json(s)))
    sub = encoding.subspace_from_json(sp, data["block_frames"])
    assert sub.stratum == (0, 0)
    assert data["density"] == pytest.approx(1.0)


def test_graph_and_connection_roundtrip():
    g = qsf.WeightedGraph(4, ((0, 1, 1.5), (1, 2, 1.0), (2, 3, 2.0), (0, 3, 1.0)))
    back = encoding.graph_from_json(json.loads(json.dumps(encoding.graph_to_json(g))))
    assert back == g
    conn = qsf.sample_haar_connection(g, "unitary", 2, RNG)
    cback = encoding.connection_from_json(
        json.loads(json.dumps(encoding.connection_to_json(conn))))
    for a, b in zip(conn.matrices, cback.matrices):
        assert np.max(np.abs(a - b)) < 1e-12


def test_parse_graph_spec(tmp_path):
    g, layout = encoding.parse_graph_spec("grid:3x2")
    assert g.n_vertices == 6 and layout[5] == (2.0, 1.0)
    path = tmp_path / "graph.json"
    payload = encoding.graph_to_json(qsf.complete_graph(3))
    payload["layout"] = {"0": [0, 0], "1": [1, 0], "2": [0.5, 1]}
    path.write_text(json.dumps(payload))
    g2, layout2 = encoding.parse_graph_spec(str(path))
    assert g2.n_edges == 3 and layout2[2] == (0.5, 1.0)


def _run_cli(*args):
    return subprocess.run([sys.executable, "-m", "dlp.cli", *args],
                          capture_output=True, text=True, timeout=600)


def test_cli_sample_and_strata(tmp_path):
    model = random_model(Field.COMPLEX, (2, 2), RNG)
    model_path = tmp_path / "model.json"
    model_path.write_text(json.dumps(encoding.model_to_json(model)))
    out = tmp_path / "samples.jsonl"
    r = _run_cli("sample", "--model", str(model_path), "--n", "20",
                 "--seed", "42", "--out", str(out))
    assert r.returncode == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 20
    first = json.loads(lines[0])
    assert set(first) == {"stratum", "block_frames", "density"}

    r2 = _run_cli("strata", "--model", str(model_path), "--out", str(tmp_path / "s.tsv"))
    assert r2.returncode == 0
    assert r2.stdout.startswith("stratum\tmass")
    total = sum(float(line.split("\t")[1])
                for line in r2.stdout.strip().splitlines()[1:])
    assert abs(total - 1.0) < 1e-9


def test_cli_sample_determinism(tmp_path):
    model = random_model(Field.REAL, (2, 1), RNG)
    model_path = tmp_path / "model.json"
    model_path.write_text(json.dumps(encoding.model_to_json(model)))
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for out in (out1, out2):
        assert _run_cli("sample", "--model", str(model_path), "--n", "30",
                        "--seed", "9", "--out", str(out)).returncode == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_qsf(tmp_path):
    svg = tmp_path / "forest.svg"
    r = _run_cli("qsf", "--graph", "grid:4x4", "--rank", "2",
                 "--group", "orthogonal", "--seed", "7", "--svg", str(svg))
    assert r.returncode == 0
    text = svg.read_text()
    assert text.startswith('<?xml') and 'version="1.1"' in text
    r2 = _run_cli("qsf", "--graph", "grid:4x4", "--rank", "2",
                  "--group", "orthogonal", "--seed", "7", "--svg", str(tmp_path / "f2.svg"))
    assert r2.returncode == 0
    assert (tmp_path / "f2.svg").read_bytes() == svg.read_bytes()


def test_cli_verify_single_suite(tmp_path):
    report = tmp_path / "report.json"
    r = _run_cli("verify", "--suite", "quaternion", "--seed", "42",
                 "--n", "500", "--report", str(report))
    assert r.returncode == 0
    data = json.loads(report.read_text())
    assert data["passed"] is True
    assert data["suites"][0]["suite"] == "quaternion"


def test_cli_verify_figure(tmp_path):
    fig = tmp_path / "report.png"
    r = _run_cli("verify", "--suite", "quaternion", "--seed", "42",
                 "--n", "200", "--figure", str(fig))
    assert r.returncode == 0
    assert fig.stat().st_size > 1000


def test_subset_index_arrays():
    from dlp.encoding import indices_to_mask, mask_to_indices

    assert mask_to_indices(0) == []
    assert mask_to_indices(0b1011) == [0, 1, 3]
    assert indices_to_mask([3, 0, 1]) == 0b1011
    for mask in (0, 1, 7, 0b10101):
        assert indices_to_mask(mask_to_indices(mask)) == mask
