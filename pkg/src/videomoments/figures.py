"""Matplotlib figure rendering (headless Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .harness import FrameSweepRow, HeatmapMatrix, SweepRow, TripletReport  # noqa: E402
from .knn import KnnReport  # noqa: E402


def render_heatmap(heatmap: HeatmapMatrix, path: str | Path) -> None:
    """Greyscale pairwise-similarity matrix, brighter = more similar."""
    n = len(heatmap.ids)
    fig, ax = plt.subplots(figsize=(max(4, n * 0.3), max(4, n * 0.3)))
    im = ax.imshow(heatmap.matrix, cmap="gray", vmin=-1.0, vmax=1.0)
    ax.set_xticks(range(n))
    ax.set_yticks(range(n))
    ax.set_xticklabels(heatmap.ids, rotation=90, fontsize=6)
    ax.set_yticklabels(heatmap.ids, fontsize=6)
    fig.colorbar(im, ax=ax, fraction=0.046)
    ax.set_title("pairwise cosine similarity")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_category_bars(report: TripletReport, path: str | Path) -> None:
    labels = list(report.per_category) + ["Avg"]
    values = [100.0 * v for v in report.per_category.values()] + [100.0 * report.overall]
    fig, ax = plt.subplots(figsize=(1.2 * len(labels) + 2, 4))
    bars = ax.bar(labels, values, color=["#4878a8"] * (len(labels) - 1) + ["#a84848"])
    ax.bar_label(bars, fmt="%.1f", fontsize=8)
    ax.set_ylim(0, 105)
    ax.set_ylabel("retrieval accuracy (%)")
    ax.set_title(report.config_label)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_knn_bars(report: KnnReport, path: str | Path) -> None:
    labels = ["Acc@1 majority", "Acc@1 weighted", "Acc@5 weighted"]
    values = [
        100.0 * report.acc1_majority,
        100.0 * report.acc1_weighted,
        100.0 * report.acc5_weighted,
    ]
    fig, ax = plt.subplots(figsize=(6, 4))
    bars = ax.bar(labels, values, color="#4878a8")
    ax.bar_label(bars, fmt="%.1f", fontsize=8)
    ax.set_ylim(0, 105)
    ax.set_ylabel("accuracy (%)")
    ax.set_title(f"kNN evaluation (K={report.k})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_ablation_bars(rows: list[SweepRow], path: str | Path) -> None:
    usable = [r for r in rows if r.accuracy is not None]
    labels = [r.label for r in usable][::-1]
    values = [100.0 * r.accuracy for r in usable][::-1]
    fig, ax = plt.subplots(figsize=(7, 0.4 * max(len(labels), 4) + 2))
    bars = ax.barh(labels, values, color="#4878a8")
    ax.bar_label(bars, fmt="%.1f", fontsize=8)
    ax.set_xlim(0, 105)
    ax.set_xlabel("retrieval accuracy (%)")
    ax.set_title("ablation sweep")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_frame_sweep(rows: list[FrameSweepRow], path: str | Path) -> None:
    frames = [r.frames for r in rows]
    values = [100.0 * r.accuracy for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(frames, values, marker="o", color="#4878a8")
    ax.set_xscale("log", base=2)
    ax.set_xticks(frames)
    ax.set_xticklabels([str(f) for f in frames])
    ax.set_xlabel("frames sampled")
    ax.set_ylabel("retrieval accuracy (%)")
    ax.set_ylim(0, 105)
    ax.set_title("temporal sampling sweep")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
