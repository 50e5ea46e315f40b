"""Acceptance gate: every verification suite must pass at its stated
tolerance and within its runtime budget, and reports must be byte-identical
across repeated seeded runs whatever DLP_THREADS is.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per case.
"""

import os
import subprocess
import sys
import time

import pytest

from dlp import harness
from dlp.harness import VerifyConfig

SEED = 42

# suite name -> wall-clock budget in seconds
CRITERIA = [
    ("dpp-core", 30.0),
    ("quaternion", 60.0),
    ("density-consistency", 30.0),
    ("sampler-law", 300.0),
    ("projection-geometry", 300.0),
    ("transforms", 180.0),
    ("inequalities", 120.0),
    ("qsf", 300.0),
    ("restriction-of-scalars", 120.0),
]

_cache = {}


def _run(name):
    if name not in _cache:
        start = time.perf_counter()
        report = harness.run_suite(name, VerifyConfig(seed=SEED))
        _cache[name] = (report, time.perf_counter() - start)
    return _cache[name]


@pytest.mark.parametrize("suite,budget", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(suite, budget):
    report, elapsed = _run(suite)
    for case in report.cases:
        mark = "pass" if case.passed else "FAIL"
        print(f"[{mark}] {suite}/{case.case_id}: {case.statistic:.6g} "
              f"{case.comparison} {case.threshold:g}  ({case.runtime_s:.2f}s)")
        assert case.passed, (
            f"{suite}/{case.case_id}: statistic {case.statistic} violates "
            f"{case.comparison} {case.threshold} ({case.note})")
    print(f"[pass] {suite}: runtime {elapsed:.1f}s (budget {budget:.0f}s)")
    assert elapsed < budget, f"{suite} took {elapsed:.1f}s, budget {budget}s"


def _verify_cmd(tmpdir, tag, threads):
    out = os.path.join(tmpdir, f"report-{tag}.json")
    env = dict(os.environ, DLP_THREADS=str(threads))
    proc = subprocess.run(
        [sys.executable, "-m", "dlp.cli", "verify", "--seed", str(SEED),
         "--n", "2000", "--report", out],
        capture_output=True, text=True, env=env, timeout=1800)
    assert proc.returncode in (0, 1), proc.stderr
    with open(out, "rb") as fh:
        return proc.returncode, fh.read()


def test_criterion_determinism(tmp_path):
    """Identical invocations give byte-identical reports, whatever
    DLP_THREADS says (Monte-Carlo counts capped to keep this quick; the
    property does not depend on the sample counts)."""
    code1, bytes1 = _verify_cmd(str(tmp_path), "t1", threads=1)
    code4, bytes4 = _verify_cmd(str(tmp_path), "t4", threads=4)
    code1b, bytes1b = _verify_cmd(str(tmp_path), "t1b", threads=1)
    assert bytes1 == bytes4 == bytes1b
    assert code1 == code4 == code1b
    print(f"[pass] determinism: 3 runs byte-identical ({len(bytes1)} bytes), "
          f"exit code {code1}")
