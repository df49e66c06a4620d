"""Figures for the CLI report paths (rendered off-screen with Agg)."""

from __future__ import annotations

from collections import Counter
from typing import Sequence


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


_COLORS = {
    "pass_tight": "#2b8a3e",
    "pass_accurate": "#69db7c",
    "pass_valid": "#b2f2bb",
    "fail_unsound": "#c92a2a",
    "fail_inaccurate": "#f08c00",
    "skip_unsupported": "#adb5bd",
    "error": "#5f3dc4",
}


def plot_verdicts(report, path) -> None:
    """Stacked bars of verdict counts per function."""
    plt = _pyplot()
    per = report.per_function
    funcs = list(per)
    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(funcs) + 2), 4))
    bottom = [0] * len(funcs)
    for verdict, color in _COLORS.items():
        counts = [per[f].get(verdict, 0) for f in funcs]
        if any(counts):
            ax.bar(funcs, counts, bottom=bottom, color=color, label=verdict)
            bottom = [b + c for b, c in zip(bottom, counts)]
    ax.set_ylabel("cases")
    ax.set_title(f"claim {report.claim}, adapter {report.adapter}")
    ax.tick_params(axis="x", rotation=45)
    if funcs:
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_hardness(cases: Sequence, path, title: str = "") -> None:
    """Hardness of each hard-to-round argument, and the histogram of hardness."""
    plt = _pyplot()
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    for kind, marker in (("zeros", "o"), ("ones", "^")):
        pts = [(float(c.x), c.hardness) for c in cases if c.run_kind == kind]
        if pts:
            xs, hs = zip(*pts)
            left.scatter(xs, hs, marker=marker, label=f"{kind} run")
    left.set_xlabel("argument")
    left.set_ylabel("hardness (bits)")
    if cases:
        left.legend(fontsize="small")
    hist = Counter(c.hardness for c in cases)
    right.bar(list(hist), list(hist.values()), color="#1971c2")
    right.set_xlabel("hardness (bits)")
    right.set_ylabel("arguments")
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
