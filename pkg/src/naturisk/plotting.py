"""Figure rendering for the report stage (Agg backend, byte-stable PNGs)."""

from __future__ import annotations

from contextlib import contextmanager
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 8,
    "figure.dpi": 100,
    "savefig.dpi": 120,
}

BAR_COLOR = "#3b6e4f"
LOSS_COLOR = "#a23b2a"


@contextmanager
def report_style():
    with plt.rc_context(STYLE):
        yield


def _save(fig, path: Path) -> Path:
    # drop the version string so reruns on any matplotlib produce the same bytes
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)
    return path


def plot_cdi_by_country(cdi: Mapping[str, float], path: Path, year: int) -> Path:
    labels = sorted(cdi, key=lambda k: (cdi[k], k))
    values = [100.0 * cdi[k] for k in labels]
    with report_style():
        fig, ax = plt.subplots(figsize=(6.0, 0.3 * len(labels) + 1.2))
        ax.barh(labels, values, color=BAR_COLOR)
        ax.set_xlim(0, 100)
        ax.set_xlabel(f"Country Degradation Index {year} (%)")
        for y, v in enumerate(values):
            ax.text(v + 1, y, f"{v:.1f}%", va="center", fontsize=7)
        fig.tight_layout()
        return _save(fig, path)


def plot_hazard_damage_range(damages: Mapping[str, Sequence[float]], path: Path, year: int) -> Path:
    """Min-max range with interquartile box of per-country damages by hazard."""
    kinds = list(damages)
    with report_style():
        fig, ax = plt.subplots(figsize=(6.0, 3.2))
        for i, kind in enumerate(kinds):
            vals = 100.0 * np.asarray(damages[kind], dtype=float)
            lo, q1, med, q3, hi = np.percentile(vals, [0, 25, 50, 75, 100])
            ax.plot([i, i], [lo, hi], color="0.4", lw=1)
            ax.add_patch(plt.Rectangle((i - 0.2, q1), 0.4, max(q3 - q1, 0.3), color=BAR_COLOR, alpha=0.8))
            ax.plot([i - 0.2, i + 0.2], [med, med], color="white", lw=1.5)
        ax.set_xticks(range(len(kinds)))
        ax.set_xticklabels([k.replace("_", " ") for k in kinds], rotation=15)
        ax.set_xlim(-0.6, len(kinds) - 0.4)
        ax.set_ylim(0, 100)
        ax.set_ylabel(f"Damage in {year} (%)")
        fig.tight_layout()
        return _save(fig, path)


def plot_loss_histogram(edges: Sequence[float], counts: Sequence[int], mean: float, path: Path) -> Path:
    edges = 100.0 * np.asarray(edges, dtype=float)
    with report_style():
        fig, ax = plt.subplots(figsize=(6.0, 3.2))
        ax.bar(edges[:-1], counts, width=np.diff(edges), align="edge", color=LOSS_COLOR, edgecolor="white", lw=0.3)
        ax.axvline(100.0 * mean, color="0.2", ls="--", lw=1)
        ax.text(100.0 * mean, max(counts) if len(counts) else 1, f" mean {100.0 * mean:.1f}%", va="top", fontsize=8)
        ax.set_xlim(-100, 0)
        ax.set_xlabel("Loss of firm value (%)")
        ax.set_ylabel("Firms")
        fig.tight_layout()
        return _save(fig, path)


def plot_sector_losses(stats: Sequence[tuple[str, float]], path: Path) -> Path:
    labels = [s for s, _ in stats]
    values = [100.0 * v for _, v in stats]
    with report_style():
        fig, ax = plt.subplots(figsize=(6.0, 0.28 * len(labels) + 1.2))
        ax.barh(labels[::-1], values[::-1], color=LOSS_COLOR)
        ax.set_xlim(-100, 0)
        ax.set_xlabel("Mean equity price change (%)")
        fig.tight_layout()
        return _save(fig, path)
