"""Monte-Carlo statistics, seed derivation and suite reports.

Every verification case draws from a generator derived from the master seed
and the case label alone, so reports are byte-identical however many worker
threads run the battery.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats as scipy_stats

__all__ = [
    "DegenerateBinsError",
    "chi_square",
    "two_sample_chi_square",
    "mean_band",
    "RngSpec",
    "CaseResult",
    "SuiteReport",
    "VerifyConfig",
    "run_suite",
    "suite_names",
]

MIN_EXPECTED_COUNT = 5.0


class DegenerateBinsError(ValueError):
    """Chi-square input collapsed to a single bin after pooling."""


def _pool_bins(observed: np.ndarray, expected: np.ndarray):
    """Pool bins whose expected count is below the chi-square rule of thumb
    into one composite bin (merged further into the smallest regular bin if
    still short)."""
    small = expected < MIN_EXPECTED_COUNT
    if not np.any(small):
        return observed, expected
    obs = list(observed[~small])
    exp = list(expected[~small])
    pool_obs = float(observed[small].sum())
    pool_exp = float(expected[small].sum())
    if pool_exp >= MIN_EXPECTED_COUNT:
        obs.append(pool_obs)
        exp.append(pool_exp)
    elif exp:
        j = int(np.argmin(exp))
        obs[j] += pool_obs
        exp[j] += pool_exp
    return np.asarray(obs), np.asarray(exp)


def chi_square(observed, expected_probs) -> float:
    """p-value of the chi-square goodness-of-fit test of observed counts
    against exact bin probabilities (which must sum to 1)."""
    observed = np.asarray(observed, dtype=float)
    probs = np.asarray(expected_probs, dtype=float)
    if observed.shape != probs.shape:
        raise ValueError("observed and expected shapes differ")
    if abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError(f"expected probabilities sum to {probs.sum()}, not 1")
    n = observed.sum()
    obs, exp = _pool_bins(observed, probs * n)
    if obs.size < 2:
        raise DegenerateBinsError("need at least two bins after pooling")
    stat = float(((obs - exp) ** 2 / exp).sum())
    return float(scipy_stats.chi2.sf(stat, obs.size - 1))


def two_sample_chi_square(counts_a, counts_b) -> float:
    """p-value of the contingency chi-square test that two histograms over
    the same bins come from one distribution."""
    a = np.asarray(counts_a, dtype=float)
    b = np.asarray(counts_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("histograms must share their bins")
    na, nb = a.sum(), b.sum()
    pooled = (a + b) / (na + nb)
    # pool on the expected count of the smaller sample
    small = pooled * min(na, nb) < MIN_EXPECTED_COUNT
    if np.any(small):
        a = np.append(a[~small], a[small].sum())
        b = np.append(b[~small], b[small].sum())
        pooled = (a + b) / (na + nb)
        if pooled[-1] * min(na, nb) < MIN_EXPECTED_COUNT and pooled.size > 1:
            a[-2] += a[-1]
            b[-2] += b[-1]
            a, b = a[:-1], b[:-1]
            pooled = (a + b) / (na + nb)
    if a.size < 2:
        raise DegenerateBinsError("need at least two bins after pooling")
    stat = 0.0
    for counts, n in ((a, na), (b, nb)):
        exp = pooled * n
        stat += float(((counts - exp) ** 2 / exp).sum())
    return float(scipy_stats.chi2.sf(stat, a.size - 1))


def mean_band(samples, axis: int = 0):
    """Sample mean and standard error along an axis (entrywise for arrays)."""
    samples = np.asarray(samples)
    n = samples.shape[axis]
    if n < 2:
        raise ValueError("need at least two samples")
    mean = samples.mean(axis=axis)
    se = samples.std(axis=axis, ddof=1) / np.sqrt(n)
    return mean, se


@dataclass(frozen=True)
class RngSpec:
    """Deterministic stream derivation: one generator per (seed, labels)."""

    master_seed: int

    def generator(self, *labels) -> np.random.Generator:
        key = "/".join([str(self.master_seed)] + [str(x) for x in labels])
        digest = hashlib.sha256(key.encode()).digest()
        return np.random.default_rng(int.from_bytes(digest[:8], "little"))


@dataclass
class CaseResult:
    case_id: str
    statistic: float
    threshold: float
    comparison: str  # "<=" or ">="
    passed: bool
    runtime_s: float = 0.0
    note: str = ""


@dataclass
class SuiteReport:
    suite: str
    seed: int
    n_override: int | None
    cases: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def to_json_dict(self) -> dict:
        # runtimes stay out of the serialised report so that repeated runs
        # are byte-identical; they are printed on the console instead
        return {
            "suite": self.suite,
            "seed": self.seed,
            "n": self.n_override,
            "passed": self.passed,
            "cases": [
                {
                    "case": c.case_id,
                    "statistic": c.statistic,
                    "threshold": c.threshold,
                    "comparison": c.comparison,
                    "passed": c.passed,
                    "note": c.note,
                }
                for c in sorted(self.cases, key=lambda c: c.case_id)
            ],
        }


def report_to_json(reports: list) -> str:
    payload = {
        "passed": all(r.passed for r in reports),
        "suites": [r.to_json_dict() for r in reports],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class VerifyConfig:
    """Knobs of a verification run; n rescales Monte-Carlo sample counts."""

    seed: int = 42
    n: int | None = None
    threads: int = 1

    def samples(self, default: int) -> int:
        return default if self.n is None else min(self.n, default)


def default_threads() -> int:
    raw = os.environ.get("DLP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_suite(name: str, config: VerifyConfig) -> SuiteReport:
    """Execute one registered suite; results are ordered and seeded by case
    id, independent of thread scheduling."""
    from . import suites  # deferred: suites import the whole library

    if name not in suites.SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(suite_names())}")
    rng_spec = RngSpec(config.seed)
    cases = suites.SUITES[name]

    def run_case(item):
        case_id, fn = item
        rng = rng_spec.generator(name, case_id)
        start = time.perf_counter()
        out = fn(rng, config)
        out.runtime_s = time.perf_counter() - start
        out.case_id = case_id
        return out

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(run_case, cases))
    else:
        results = [run_case(item) for item in cases]
    results.sort(key=lambda c: c.case_id)
    return SuiteReport(name, config.seed, config.n, results)


def suite_names() -> list:
    from . import suites

    return sorted(suites.SUITES)
