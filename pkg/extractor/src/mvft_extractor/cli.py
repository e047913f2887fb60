"""CLI: extract a single clip or a batch manifest to MVFT files."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ExtractorError
from .extract import (
    TOKEN_POLICIES,
    ExtractionSpec,
    extract,
    extract_batch,
    load_video_manifest,
)


def _spec_from_args(args: argparse.Namespace) -> ExtractionSpec:
    return ExtractionSpec(
        backbone=args.backbone,
        frames=args.frames,
        tokens=args.tokens,
        resize_policy=args.resize_policy,
    )


def _add_spec_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--backbone", default="pixelgrid",
                        help="backbone name (default pixelgrid; also vit-random, "
                             "vit-imagenet, dino-v2)")
    parser.add_argument("--frames", type=int, default=32,
                        help="frames to sample uniformly (default 32)")
    parser.add_argument("--tokens", choices=TOKEN_POLICIES, default="patches_only",
                        help="token policy (default patches_only)")
    parser.add_argument("--resize-policy", choices=["resize_center_crop", "stretch"],
                        default="resize_center_crop",
                        help="how frames reach the backbone's native resolution")


def cmd_extract(args: argparse.Namespace) -> int:
    result = extract(args.video, _spec_from_args(args), args.out, video_id=args.video_id)
    note = " (short clip: frames repeated)" if result.repeated_frames else ""
    print(f"wrote {result.mvft_path} shape={result.shape}{note}")
    print(f"wrote {result.sidecar_path}")
    return 0


def cmd_extract_batch(args: argparse.Namespace) -> int:
    if Path(args.videos).is_dir():
        videos = [
            {"video_id": p.stem, "path": p}
            for p in sorted(Path(args.videos).iterdir())
            if p.suffix.lower() in (".mp4", ".avi", ".mkv", ".mov", ".webm")
        ]
    else:
        videos = load_video_manifest(args.videos)
    summary = extract_batch(videos, _spec_from_args(args), args.out)
    summary_path = Path(args.out) / "summary.json"
    summary_path.write_text(summary.to_json())
    print(f"extracted {len(summary.extracted)}, failures {len(summary.failures)}")
    print(f"wrote {summary_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvft-extract",
        description="Extract per-frame patch features from videos into MVFT files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract one clip")
    p.add_argument("--video", required=True, help="input video path")
    p.add_argument("--out", required=True, help="output .mvft path")
    p.add_argument("--video-id", default=None, help="id stored in the file (default: stem)")
    _add_spec_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("extract-batch", help="extract a directory or JSON manifest of clips")
    p.add_argument("--videos", required=True,
                   help="directory of clips, or JSON manifest with a 'videos' list")
    p.add_argument("--out", required=True, help="output directory")
    _add_spec_flags(p)
    p.set_defaults(func=cmd_extract_batch)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ExtractorError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
