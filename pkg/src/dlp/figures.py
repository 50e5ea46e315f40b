"""Matplotlib figures rendered next to the delimited report outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["report_figure", "strata_figure"]


def _margin(case) -> float:
    """Normalised pass margin: > 1 passes, < 1 fails, on a log-friendly scale."""
    eps = 1e-300
    if case.comparison == ">=":
        return max(case.statistic, eps) / max(case.threshold, eps)
    if case.statistic <= 0.0 <= case.threshold:
        return 1e3  # met a zero-tolerance bound exactly
    return max(case.threshold, eps) / max(case.statistic, eps)


def report_figure(reports, path: str) -> None:
    """One horizontal bar per case: log10 of the pass margin, colour-coded."""
    labels, margins, colors = [], [], []
    for rep in reports:
        for c in rep.cases:
            labels.append(f"{rep.suite}/{c.case_id}")
            margins.append(np.log10(_margin(c)))
            colors.append("#2e7d32" if c.passed else "#c62828")
    fig, ax = plt.subplots(figsize=(8, max(2.0, 0.28 * len(labels) + 1.2)))
    y = np.arange(len(labels))
    ax.barh(y, margins, color=colors)
    ax.axvline(0.0, color="black", lw=1)
    ax.set_yticks(y)
    ax.set_yticklabels(labels, fontsize=7)
    ax.invert_yaxis()
    ax.set_xlabel("log10 pass margin (positive passes)")
    ax.set_title("verification battery")
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Software": None} if path.endswith(".png") else None)
    plt.close(fig)


def strata_figure(masses: dict, path: str) -> None:
    """Bar chart of stratum masses keyed by the split-dimension tuples."""
    keys = list(masses)
    vals = [masses[k] for k in keys]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.5 * len(keys) + 1.0), 3.2))
    ax.bar(range(len(keys)), vals, color="#37474f")
    ax.set_xticks(range(len(keys)))
    ax.set_xticklabels([",".join(map(str, k)) for k in keys], rotation=90, fontsize=7)
    ax.set_ylabel("mass")
    ax.set_title("stratum masses")
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Software": None} if path.endswith(".png") else None)
    plt.close(fig)
