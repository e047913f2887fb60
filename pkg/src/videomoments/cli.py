"""Command-line interface.

Subcommands: embed, index-info, retrieve, heatmap, eval, gen-synth,
selftest, validate. Exit codes: 0 success, 1 validation/contract error,
2 I/O error. With --json-errors a machine-readable error object is
printed to stderr instead of the human-readable message.

Configuration is flags-first with an optional --config-file (canonical
``key=value;...`` text) whose values explicit flags override. All
randomness flows from --seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .errors import ValidationError, VideoMomentsError
from .featureio import FeatureTensor, read_feature_path, validate, write_feature_path
from .harness import (
    EmbeddingCache,
    embed_manifest,
    frame_count_sweep,
    group_similarity_means,
    heatmap_from_index,
    run_knn_benchmark,
    run_triplet_benchmark,
    ablation_sweep,
)
from .manifest import load_manifest
from .moments import FUSIONS, LEVELS, MomentConfig, compute_embedding
from .retrieval import build_index, rank, read_index_path, write_index_path
from .synthetic import generate_labeled_synthetic, generate_synthetic

FAULT_ENV = "VIDEOMOMENTS_SELFTEST_FAULT"

# chance band width for the no-signal selftest check: 3 binomial sigmas
_CHANCE_SIGMAS = 3.0


def _formatter(prog: str) -> argparse.HelpFormatter:
    return argparse.HelpFormatter(prog, width=96)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("moment config")
    group.add_argument("--config-file", type=Path, default=None,
                       help="canonical config text file; explicit flags override it")
    group.add_argument("--orders", type=int, default=None,
                       help="number of moment orders (default: length of --weights)")
    group.add_argument("--weights", type=str, default=None,
                       help="comma-separated moment weights, e.g. 1,8,4")
    group.add_argument("--level", choices=LEVELS, default=None,
                       help="representation level (default patch)")
    group.add_argument("--fusion", choices=FUSIONS, default=None,
                       help="block fusion mode (default concat)")
    group.add_argument("--per-moment-normalize", choices=["true", "false"], default=None,
                       help="unit-normalize each moment block before weighting (default true)")
    group.add_argument("--frames", type=int, default=None,
                       help="target frame count recorded in the config (default 32)")


def _config_from_args(args: argparse.Namespace) -> MomentConfig:
    base = MomentConfig()
    if args.config_file is not None:
        base = MomentConfig.from_string(Path(args.config_file).read_text(), base)
    fields: dict = {}
    if args.weights is not None:
        try:
            fields["weights"] = tuple(float(w) for w in args.weights.split(","))
        except ValueError:
            raise ValidationError(f"malformed --weights {args.weights!r}") from None
    if args.orders is not None:
        fields["orders"] = args.orders
    elif "weights" in fields:
        fields["orders"] = len(fields["weights"])
    if args.level is not None:
        fields["level"] = args.level
    if args.fusion is not None:
        fields["fusion"] = args.fusion
    if args.per_moment_normalize is not None:
        fields["per_moment_normalize"] = args.per_moment_normalize == "true"
    if args.frames is not None:
        fields["frames"] = args.frames
    return MomentConfig(
        orders=fields.get("orders", base.orders),
        weights=fields.get("weights", base.weights),
        level=fields.get("level", base.level),
        fusion=fields.get("fusion", base.fusion),
        per_moment_normalize=fields.get("per_moment_normalize", base.per_moment_normalize),
        frames=fields.get("frames", base.frames),
    )


def _collect_feature_files(specs: list[str]) -> list[Path]:
    files: list[Path] = []
    for spec in specs:
        path = Path(spec)
        if path.is_dir():
            files.extend(sorted(path.glob("*.mvft")))
        else:
            files.append(path)
    return files


def cmd_embed(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    files = _collect_feature_files(args.features)
    if not files:
        raise ValidationError("no feature files")
    embeddings = []
    errors: list[str] = []
    for path in files:
        try:
            tensor = read_feature_path(path)
            embeddings.append(compute_embedding(tensor, config))
        except (VideoMomentsError, OSError) as exc:
            errors.append(f"{path}: {exc}")
    for line in errors:
        print(f"error: {line}", file=sys.stderr)
    if errors or not embeddings:
        return 1
    index = build_index(embeddings)
    write_index_path(index, args.out)
    print(f"wrote index: {index.size} embeddings x {index.dim} dims "
          f"(config {config.label()}, digest {index.config_digest}) -> {args.out}")
    return 0


def cmd_index_info(args: argparse.Namespace) -> int:
    index = read_index_path(args.index)
    print(f"embeddings: {index.size}")
    print(f"dimension: {index.dim}")
    print(f"config_digest: {index.config_digest}")
    for vid in index.ids[: args.show_ids]:
        print(f"id: {vid}")
    if index.size > args.show_ids:
        print(f"... {index.size - args.show_ids} more")
    return 0


def cmd_retrieve(args: argparse.Namespace) -> int:
    index = read_index_path(args.index)
    pool = None
    if args.pool:
        pool = args.pool.split(",")
    elif args.pool_file:
        pool = [line.strip() for line in Path(args.pool_file).read_text().splitlines() if line.strip()]
    ranked = rank(index, args.query_id, pool)
    top = ranked.entries if args.top_n is None else ranked.entries[: args.top_n]
    for position, (vid, score) in enumerate(top, start=1):
        print(f"{position}\t{vid}\t{score:.6f}")
    return 0


def cmd_heatmap(args: argparse.Namespace) -> int:
    from .reports import write_heatmap

    index = read_index_path(args.index)
    heatmap = heatmap_from_index(index)
    written = write_heatmap(heatmap, args.out, figures=not args.no_figures)
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    files = _collect_feature_files(args.features)
    if not files:
        raise ValidationError("no feature files")
    bad = 0
    for path in files:
        try:
            tensor = read_feature_path(path)
        except (VideoMomentsError, OSError) as exc:
            print(f"{path}: ERROR {exc}")
            bad += 1
            continue
        diag = validate(tensor)
        if diag.issues:
            bad += 1
            print(f"{path}: {len(diag.issues)} issue(s)")
            for issue in diag.issues:
                print(f"  - {issue}")
        else:
            print(
                f"{path}: ok id={diag.video_id} shape={diag.shape} "
                f"min={diag.min:.6g} max={diag.max:.6g} mean={diag.mean:.6g}"
            )
    return 1 if bad else 0


def _parse_count_dirs(specs: list[str]) -> dict[int, Path]:
    out: dict[int, Path] = {}
    for spec in specs:
        if "=" not in spec:
            raise ValidationError(f"malformed --frames-dir {spec!r}: expected COUNT=DIR")
        count, directory = spec.split("=", 1)
        out[int(count)] = Path(directory)
    return out


def cmd_eval(args: argparse.Namespace) -> int:
    from .reports import (
        write_ablation_report,
        write_frame_sweep_report,
        write_knn_report,
        write_triplet_report,
    )

    manifest = load_manifest(args.manifest)
    config = _config_from_args(args)
    out_dir = Path(args.out)
    figures = not args.no_figures
    cache = EmbeddingCache()

    if manifest.kind == "labeled_knn":
        report = run_knn_benchmark(manifest, config, k=args.knn, threads=args.threads, cache=cache)
        written = write_knn_report(report, out_dir, figures=figures)
        print(f"acc1_majority={report.acc1_majority:.4f} "
              f"acc1_weighted={report.acc1_weighted:.4f} "
              f"acc5_weighted={report.acc5_weighted:.4f}")
    elif args.sweep_frames:
        counts = [int(c) for c in args.sweep_frames.split(",")]
        rows = frame_count_sweep(
            manifest, config, counts,
            per_count_dirs=_parse_count_dirs(args.frames_dir or []),
            threads=args.threads, cache=cache,
        )
        written = write_frame_sweep_report(rows, out_dir, figures=figures)
        for row in rows:
            print(f"frames={row.frames} accuracy={row.accuracy:.4f}")
    elif args.sweep_config:
        configs = [MomentConfig.from_string(text, config) for text in args.sweep_config]
        rows = ablation_sweep(manifest, configs, threads=args.threads, cache=cache)
        written = write_ablation_report(rows, out_dir, figures=figures)
        for row in rows:
            if row.accuracy is None:
                print(f"{row.label} failed: {row.error}")
            else:
                print(f"{row.label} accuracy={row.accuracy:.4f}")
    else:
        report = run_triplet_benchmark(manifest, config, threads=args.threads, cache=cache)
        written = write_triplet_report(report, out_dir, figures=figures)
        print(f"{report.config_label} overall={report.overall:.4f}")
        for category, value in report.per_category.items():
            print(f"{category}: {value:.4f}")
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_gen_synth(args: argparse.Namespace) -> int:
    if args.kind == "triplet":
        manifest, path = generate_synthetic(
            args.out, seed=args.seed, groups=args.groups, per_group=args.per_group,
            frames=args.gen_frames, patches=args.patches, dim=args.dim,
            appearance_confound=args.appearance_confound,
            motion_signal=args.motion_signal, noise_scale=args.noise_scale,
        )
    else:
        manifest, path = generate_labeled_synthetic(
            args.out, seed=args.seed, classes=args.groups, per_class=args.per_group,
            frames=args.gen_frames, patches=args.patches, dim=args.dim,
            appearance_confound=args.appearance_confound,
            motion_signal=args.motion_signal, noise_scale=args.noise_scale,
        )
    print(f"wrote {len(manifest.video_ids())} videos, manifest -> {path}")
    return 0


def _fault_injection(workdir: Path, manifest) -> None:
    """Test hook: overwrite a third of the feature files with constant tensors."""
    paths = sorted(manifest.feature_paths().items())
    for vid, path in paths[:: 3]:
        tensor = read_feature_path(path)
        flat = np.full_like(tensor.data, 0.5)
        write_feature_path(FeatureTensor(video_id=vid, data=flat), path)


def cmd_selftest(args: argparse.Namespace) -> int:
    """Generate a planted benchmark and check the headline engine properties."""
    results: list[tuple[str, bool, str]] = []

    def check(name: str, ok: bool, detail: str) -> None:
        results.append((name, bool(ok), detail))

    with tempfile.TemporaryDirectory(prefix="videomoments-selftest-") as tmp:
        tmp_path = Path(tmp)
        manifest, _ = generate_synthetic(
            tmp_path / "planted", seed=args.seed, groups=20, per_group=5,
        )
        if os.environ.get(FAULT_ENV) == "1":
            _fault_injection(tmp_path / "planted", manifest)
            manifest = load_manifest(tmp_path / "planted" / "manifest.json")

        cache = EmbeddingCache()
        config_full = MomentConfig(weights=(1.0, 8.0, 4.0))
        config_mean = MomentConfig(orders=3, weights=(1.0, 0.0, 0.0))
        report_full = run_triplet_benchmark(manifest, config_full, threads=args.threads, cache=cache)
        report_mean = run_triplet_benchmark(manifest, config_mean, threads=args.threads, cache=cache)
        check(
            "planted-accuracy",
            report_full.overall >= 0.9,
            f"(1,8,4)-patch-concat accuracy {report_full.overall:.4f} >= 0.9",
        )
        check(
            "moment-advantage",
            report_full.overall > report_mean.overall,
            f"(1,8,4) {report_full.overall:.4f} > (1,0,0) {report_mean.overall:.4f}",
        )

        null_manifest, _ = generate_synthetic(
            tmp_path / "null", seed=args.seed, groups=20, per_group=5, motion_signal=0.0,
        )
        null_report = run_triplet_benchmark(null_manifest, config_full, threads=args.threads)
        n = null_report.n_triplets
        pool = len(null_manifest.video_ids()) - 1
        chance = 1.0 / pool
        sigma = (chance * (1.0 - chance) / n) ** 0.5
        band = _CHANCE_SIGMAS * sigma
        per_triplet = sum(r.success for r in null_report.records) / n
        check(
            "no-signal-chance",
            abs(per_triplet - chance) <= band,
            f"no-signal accuracy {per_triplet:.4f} within {chance:.4f} +/- {band:.4f}",
        )

        rerun = run_triplet_benchmark(manifest, config_full, threads=args.threads)
        check(
            "determinism",
            rerun.overall == report_full.overall
            and [r.success for r in rerun.records] == [r.success for r in report_full.records],
            "re-run reproduces the report",
        )

        heat_manifest, _ = generate_synthetic(
            tmp_path / "heat", seed=args.seed, groups=4, per_group=3,
        )
        embeddings, _ = embed_manifest(heat_manifest, config_full, threads=args.threads)
        from .harness import similarity_heatmap

        heatmap = similarity_heatmap(list(embeddings.values()))
        groups = {vid: vid.split("-")[1] for vid in heatmap.ids}
        within, cross = group_similarity_means(heatmap, groups)
        check(
            "heatmap-clusters",
            within > cross,
            f"within-group mean {within:.4f} > cross-group mean {cross:.4f}",
        )

    failed = [name for name, ok, _ in results if not ok]
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    print(f"selftest: {len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="cap engine parallelism (default: available cores)")
    common.add_argument("--seed", type=int, default=7,
                        help="seed for all randomness (default 7)")
    common.add_argument("--json-errors", action="store_true",
                        help="emit machine-readable error JSON on stderr")

    parser = argparse.ArgumentParser(
        prog="videomoments",
        description="Moment-statistics video embeddings and motion-centric retrieval evaluation.",
        formatter_class=_formatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", parents=[common], formatter_class=_formatter,
                       help="embed feature files and write an index")
    p.add_argument("--features", nargs="+", required=True,
                   help="MVFT files and/or directories to scan for *.mvft")
    p.add_argument("--out", required=True, help="output index path (.mvix)")
    _add_config_flags(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("index-info", parents=[common], formatter_class=_formatter,
                       help="print index shape, digest, and ids")
    p.add_argument("--index", required=True, help="index file (.mvix)")
    p.add_argument("--show-ids", type=int, default=10, help="how many ids to list (default 10)")
    p.set_defaults(func=cmd_index_info)

    p = sub.add_parser("retrieve", parents=[common], formatter_class=_formatter,
                       help="rank candidates for a query; TSV rank/id/score on stdout")
    p.add_argument("--index", required=True, help="index file (.mvix)")
    p.add_argument("--query-id", required=True, help="query video id (must be in the index)")
    p.add_argument("--pool", default=None, help="comma-separated candidate ids (default: all)")
    p.add_argument("--pool-file", default=None, help="file with one candidate id per line")
    p.add_argument("--top-n", type=int, default=None, help="print only the first N entries")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("heatmap", parents=[common], formatter_class=_formatter,
                       help="pairwise similarity matrix as CSV, PGM, and PNG")
    p.add_argument("--index", required=True, help="index file (.mvix)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-figures", action="store_true", help="skip the PNG rendering")
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("eval", parents=[common], formatter_class=_formatter,
                       help="run a benchmark manifest; writes JSON, CSV, Markdown, figures")
    p.add_argument("--manifest", required=True, help="benchmark manifest (JSON)")
    p.add_argument("--out", required=True, help="output directory for reports")
    p.add_argument("--knn", type=int, default=20,
                   help="neighbor count for labeled_knn manifests (default 20)")
    p.add_argument("--sweep-frames", default=None,
                   help="comma-separated frame counts, e.g. 4,8,16,32")
    p.add_argument("--frames-dir", action="append", default=None, metavar="COUNT=DIR",
                   help="feature directory for a sweep count larger than the stored frames")
    p.add_argument("--sweep-config", action="append", default=None, metavar="CFG",
                   help="ablation row as canonical config text (repeatable); "
                        "unset keys inherit the base flags")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    _add_config_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen-synth", parents=[common], formatter_class=_formatter,
                       help="generate a deterministic planted-signal benchmark")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--kind", choices=["triplet", "labeled"], default="triplet",
                   help="triplet benchmark or labeled kNN set (default triplet)")
    p.add_argument("--groups", type=int, default=20, help="motion groups / classes (default 20)")
    p.add_argument("--per-group", type=int, default=5, help="videos per group (default 5)")
    p.add_argument("--gen-frames", type=int, default=32, help="frames per video (default 32)")
    p.add_argument("--patches", type=int, default=4, help="patches per frame (default 4)")
    p.add_argument("--dim", type=int, default=16, help="feature dimension (default 16)")
    p.add_argument("--appearance-confound", type=float, default=1.0,
                   help="appearance component scale (default 1.0)")
    p.add_argument("--motion-signal", type=float, default=1.0,
                   help="motion component scale (default 1.0)")
    p.add_argument("--noise-scale", type=float, default=0.02,
                   help="iid noise sigma (default 0.02)")
    p.set_defaults(func=cmd_gen_synth)

    p = sub.add_parser("selftest", parents=[common], formatter_class=_formatter,
                       help="run the planted-signal acceptance checks end to end")
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("validate", parents=[common], formatter_class=_formatter,
                       help="validate MVFT files and print diagnostics")
    p.add_argument("--features", nargs="+", required=True,
                   help="MVFT files and/or directories to scan for *.mvft")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VideoMomentsError as exc:
        _report_error(args, exc, 1)
        return 1
    except OSError as exc:
        _report_error(args, exc, 2)
        return 2


def _report_error(args: argparse.Namespace, exc: Exception, code: int) -> None:
    if getattr(args, "json_errors", False):
        payload = {"error": {"type": type(exc).__name__, "message": str(exc), "exit_code": code}}
        print(json.dumps(payload), file=sys.stderr)
    else:
        print(f"error: {exc}", file=sys.stderr)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
