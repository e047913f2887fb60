"""Report emission: JSON (full), CSV (summary), Markdown tables, heatmap files.

Markdown tables mirror the usual benchmark layouts (per-category columns
plus an average for synthetic triplet runs, a single accuracy column for
real runs and ablations). Accuracies are stored as fractions and printed
as percentages with two decimals. Figures are matplotlib PNGs rendered
next to the delimited output.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .harness import FrameSweepRow, HeatmapMatrix, SweepRow, TripletReport
from .knn import KnnReport
from .manifest import CATEGORIES


def _pct(x: float) -> str:
    return f"{100.0 * x:.2f}"


def _ensure_dir(out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def write_triplet_report(
    report: TripletReport, out_dir: str | Path, figures: bool = True
) -> list[Path]:
    out_dir = _ensure_dir(out_dir)
    written = []

    doc = {
        "name": report.name,
        "kind": report.kind,
        "config_label": report.config_label,
        "config_digest": report.config_digest,
        "overall_accuracy": report.overall,
        "per_category_accuracy": report.per_category,
        "n_triplets": report.n_triplets,
        "pool": report.pool_description,
        "failures": report.failures,
        "records": [asdict(r) for r in report.records],
    }
    json_path = out_dir / "report.json"
    json_path.write_text(json.dumps(doc, indent=2) + "\n")
    written.append(json_path)

    csv_path = out_dir / "summary.csv"
    categories = [c for c in CATEGORIES if c in report.per_category]
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["name", "kind", "config", "overall"] + categories + ["n_triplets", "n_failures"]
        )
        writer.writerow(
            [report.name, report.kind, report.config_label, _pct(report.overall)]
            + [_pct(report.per_category[c]) for c in categories]
            + [report.n_triplets, len(report.failures)]
        )
    written.append(csv_path)

    md_path = out_dir / "report.md"
    lines = [f"# {report.name}", ""]
    if report.kind == "triplet_synthetic" and categories:
        header = "| Configuration | " + " | ".join(categories) + " | Avg |"
        rule = "|---" * (len(categories) + 2) + "|"
        row = (
            f"| {report.config_label} | "
            + " | ".join(_pct(report.per_category[c]) for c in categories)
            + f" | {_pct(report.overall)} |"
        )
        lines += [header, rule, row]
    else:
        lines += [
            "| Configuration | Retrieval Accuracy |",
            "|---|---|",
            f"| {report.config_label} | {_pct(report.overall)} |",
        ]
    lines += ["", f"Pool: {report.pool_description}", f"Triplets: {report.n_triplets}"]
    if report.failures:
        lines += ["", f"Failures ({len(report.failures)}):"]
        lines += [f"- `{vid}`: {msg}" for vid, msg in sorted(report.failures.items())]
    md_path.write_text("\n".join(lines) + "\n")
    written.append(md_path)

    if figures:
        from . import figures as fig

        png = out_dir / "category_accuracy.png"
        fig.render_category_bars(report, png)
        written.append(png)
    return written


def write_knn_report(report: KnnReport, out_dir: str | Path, figures: bool = True) -> list[Path]:
    out_dir = _ensure_dir(out_dir)
    written = []

    doc = {
        "k": report.k,
        "n_queries": report.n_queries,
        "acc1_majority": report.acc1_majority,
        "acc1_weighted": report.acc1_weighted,
        "acc5_weighted": report.acc5_weighted,
        "records": [
            {
                "query_id": r.query_id,
                "true_label": r.true_label,
                "majority_label": r.majority_label,
                "weighted_labels": r.weighted_labels,
                "neighbors": r.neighbors,
                "truncated": r.truncated,
            }
            for r in report.records
        ],
    }
    json_path = out_dir / "report.json"
    json_path.write_text(json.dumps(doc, indent=2) + "\n")
    written.append(json_path)

    csv_path = out_dir / "summary.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "n_queries", "acc1_majority", "acc1_weighted", "acc5_weighted"])
        writer.writerow(
            [
                report.k,
                report.n_queries,
                _pct(report.acc1_majority),
                _pct(report.acc1_weighted),
                _pct(report.acc5_weighted),
            ]
        )
    written.append(csv_path)

    md_path = out_dir / "report.md"
    md_path.write_text(
        "\n".join(
            [
                f"# kNN evaluation (K={report.k})",
                "",
                "| Acc@1 majority | Acc@1 weighted | Acc@5 weighted |",
                "|---|---|---|",
                f"| {_pct(report.acc1_majority)} | {_pct(report.acc1_weighted)} "
                f"| {_pct(report.acc5_weighted)} |",
                "",
                f"Queries: {report.n_queries}",
            ]
        )
        + "\n"
    )
    written.append(md_path)

    if figures:
        from . import figures as fig

        png = out_dir / "knn_accuracy.png"
        fig.render_knn_bars(report, png)
        written.append(png)
    return written


def write_ablation_report(rows: list[SweepRow], out_dir: str | Path, figures: bool = True) -> list[Path]:
    out_dir = _ensure_dir(out_dir)
    written = []

    doc = [
        {"configuration": r.label, "accuracy": r.accuracy, "error": r.error} for r in rows
    ]
    json_path = out_dir / "ablation.json"
    json_path.write_text(json.dumps(doc, indent=2) + "\n")
    written.append(json_path)

    csv_path = out_dir / "ablation.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["configuration", "accuracy", "error"])
        for r in rows:
            writer.writerow([r.label, _pct(r.accuracy) if r.accuracy is not None else "", r.error or ""])
    written.append(csv_path)

    md_lines = ["# Ablation sweep", "", "| Configuration | Retrieval Accuracy |", "|---|---|"]
    for r in rows:
        value = _pct(r.accuracy) if r.accuracy is not None else f"failed: {r.error}"
        md_lines.append(f"| {r.label} | {value} |")
    md_path = out_dir / "ablation.md"
    md_path.write_text("\n".join(md_lines) + "\n")
    written.append(md_path)

    if figures:
        from . import figures as fig

        png = out_dir / "ablation_accuracy.png"
        fig.render_ablation_bars(rows, png)
        written.append(png)
    return written


def write_frame_sweep_report(
    rows: list[FrameSweepRow], out_dir: str | Path, figures: bool = True
) -> list[Path]:
    out_dir = _ensure_dir(out_dir)
    written = []

    doc = [{"frames": r.frames, "accuracy": r.accuracy} for r in rows]
    json_path = out_dir / "frame_sweep.json"
    json_path.write_text(json.dumps(doc, indent=2) + "\n")
    written.append(json_path)

    csv_path = out_dir / "frame_sweep.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frames", "accuracy"])
        for r in rows:
            writer.writerow([r.frames, _pct(r.accuracy)])
    written.append(csv_path)

    md_path = out_dir / "frame_sweep.md"
    header = "| number of frames | " + " | ".join(str(r.frames) for r in rows) + " |"
    rule = "|---" * (len(rows) + 1) + "|"
    values = "| Retrieval Accuracy | " + " | ".join(_pct(r.accuracy) for r in rows) + " |"
    md_path.write_text("\n".join(["# Temporal sampling sweep", "", header, rule, values]) + "\n")
    written.append(md_path)

    if figures:
        from . import figures as fig

        png = out_dir / "frame_sweep.png"
        fig.render_frame_sweep(rows, png)
        written.append(png)
    return written


def write_heatmap(
    heatmap: HeatmapMatrix, out_dir: str | Path, figures: bool = True
) -> list[Path]:
    """Emit the similarity matrix as CSV, 8-bit greyscale PGM, and PNG."""
    out_dir = _ensure_dir(out_dir)
    written = []

    csv_path = out_dir / "heatmap.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id"] + heatmap.ids)
        for vid, row in zip(heatmap.ids, heatmap.matrix):
            writer.writerow([vid] + [f"{v:.6f}" for v in row])
    written.append(csv_path)

    pgm_path = out_dir / "heatmap.pgm"
    write_heatmap_pgm(heatmap, pgm_path)
    written.append(pgm_path)

    if figures:
        from . import figures as fig

        png = out_dir / "heatmap.png"
        fig.render_heatmap(heatmap, png)
        written.append(png)
    return written


def write_heatmap_pgm(heatmap: HeatmapMatrix, path: str | Path) -> None:
    """Binary PGM (P5), similarity -1..1 mapped linearly to 0..255 (bright = similar)."""
    n = len(heatmap.ids)
    levels = np.clip(np.rint((heatmap.matrix + 1.0) * 127.5), 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{n} {n}\n255\n".encode("ascii"))
        fh.write(levels.tobytes())
