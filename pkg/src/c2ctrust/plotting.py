"""Figures for experiment reports. Always renders off-screen to files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

ATTACKER_COLOR = "#2ca02c"
NORMAL_COLOR = "#1f77b4"


def _draw(ax, pairs, attack_tick: int | None, title: str) -> None:
    attackers = np.array([a for a, _ in pairs])
    normals = np.array([b for _, b in pairs])
    ticks = np.arange(attackers.shape[1])
    for data, color, label in ((attackers, ATTACKER_COLOR, "attackers"), (normals, NORMAL_COLOR, "normal users")):
        mean = data.mean(axis=0)
        ax.plot(ticks, mean, color=color, lw=1.5, label=label)
        if len(data) > 1:
            lo, hi = np.percentile(data, [10, 90], axis=0)
            ax.fill_between(ticks, lo, hi, color=color, alpha=0.2, lw=0)
    if attack_tick is not None:
        ax.axvline(attack_tick, color="0.5", ls="--", lw=0.8)
    ax.set_title(title)
    ax.set_xlabel("tick")
    ax.set_ylabel("mean trust score")
    ax.set_xlim(ticks[0], ticks[-1])
    ax.set_ylim(bottom=0)


def plot_model_cohorts(model: str, pairs, path: str | Path, attack_tick: int | None = None) -> Path:
    """Mean cohort trust over seeds with a 10-90 percentile band."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    _draw(ax, pairs, attack_tick, f"Model {model} ({len(pairs)} runs)")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_cohort_grid(curves: dict, path: str | Path, attack_tick: int | None = None) -> Path:
    models = sorted(curves)
    ncols = min(2, len(models))
    nrows = -(-len(models) // ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(5 * ncols, 3.2 * nrows), squeeze=False)
    for ax, model in zip(axes.flat, models):
        _draw(ax, curves[model], attack_tick, f"Model {model}")
    for ax in list(axes.flat)[len(models):]:
        ax.set_visible(False)
    axes.flat[0].legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)
