"""Matplotlib rendering for report figures; always Agg, always to file."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def grouped_bars(ax, groups, series, values, errors=None, width=0.8):
    """Bars grouped by `groups` with one bar per `series` entry.

    values[(group, series)] -> height; errors optional same-keyed map.
    """
    n_series = max(len(series), 1)
    bar_w = width / n_series
    for si, s in enumerate(series):
        xs = [gi + (si - (n_series - 1) / 2) * bar_w for gi in range(len(groups))]
        heights = [values.get((g, s), 0.0) for g in groups]
        errs = [errors.get((g, s), 0.0) for g in groups] if errors else None
        ax.bar(xs, heights, bar_w * 0.95, yerr=errs, capsize=2, label=str(s))
    ax.set_xticks(range(len(groups)))
    ax.set_xticklabels([str(g) for g in groups])


def save_ratings_figure(rows, path: str | Path, metrics=("naturalness", "helpfulness")):
    """Grouped bar chart of rating means with stderr bars, one panel per metric."""
    fig, axes = plt.subplots(1, len(metrics), figsize=(5.5 * len(metrics), 3.2))
    axes = [axes] if len(metrics) == 1 else list(axes)
    for ax, metric in zip(axes, metrics):
        sub = [r for r in rows if r["metric"] == metric]
        groups = sorted({r["group"].get("lang", "?") for r in sub})
        series = sorted({r["group"].get("model", "?") for r in sub})
        values = {(r["group"].get("lang", "?"), r["group"].get("model", "?")): r["mean"] for r in sub}
        errors = {(r["group"].get("lang", "?"), r["group"].get("model", "?")): r["stderr"] for r in sub}
        grouped_bars(ax, groups, series, values, errors)
        ax.set_title(metric.upper())
        ax.set_ylabel("Score")
        ax.set_ylim(bottom=0)
    if axes:
        axes[-1].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_qe_figure(summary, path: str | Path):
    fig, ax = plt.subplots(figsize=(6, 3.2))
    groups = sorted(summary)
    series = ["fluency", "consistency"]
    values = {
        (g, "fluency"): summary[g]["fluency_mean"] for g in groups
    } | {(g, "consistency"): summary[g]["consistency_mean"] for g in groups}
    grouped_bars(ax, groups, series, values)
    ax.set_ylabel("Mean rating (1-5)")
    ax.set_ylim(0, 5)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_pairwise_figure(tasks, path: str | Path):
    fig, ax = plt.subplots(figsize=(6, 3.2))
    groups = sorted(tasks)
    keys = sorted({k for t in tasks.values() for k in t["tallies"]})
    values = {(g, k): tasks[g]["tallies"].get(k, 0) for g in groups for k in keys}
    grouped_bars(ax, groups, keys, values)
    ax.set_ylabel("Votes")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_allocation_figure(report, path: str | Path):
    """Bar chart of an allocation report: share of the budget per key."""
    keys = sorted(report["keys"])
    props = [report["keys"][k]["proportion"] * 100 for k in keys]
    fig, ax = plt.subplots(figsize=(max(4, 0.9 * len(keys)), 3.2))
    ax.bar(range(len(keys)), props)
    ax.set_xticks(range(len(keys)))
    ax.set_xticklabels(keys, rotation=30, ha="right")
    ax.set_ylabel("Share of sampled budget (%)")
    ax.set_title(f"mode={report['mode']} n={report.get('n')}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
