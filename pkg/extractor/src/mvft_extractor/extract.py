"""Video -> MVFT extraction with provenance sidecars."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .backbones import build_backbone, preprocess_frames
from .errors import ExtractorError
from .mvft import write_mvft
from .video import sample_frames

TOKEN_POLICIES = ("patches_only", "global_only", "patches_plus_global")


@dataclass
class ExtractionSpec:
    """What to extract: backbone, frame count, token and resize policies."""

    backbone: str = "pixelgrid"
    frames: int = 32
    tokens: str = "patches_only"
    resize_policy: str = "resize_center_crop"
    layer: str = "final"  # informational: backbones emit their final layer

    def __post_init__(self):
        if self.frames < 1:
            raise ValueError(f"frames must be >= 1, got {self.frames}")
        if self.tokens not in TOKEN_POLICIES:
            raise ValueError(f"tokens must be one of {TOKEN_POLICIES}, got {self.tokens!r}")


@dataclass
class ExtractionResult:
    video_id: str
    mvft_path: Path
    sidecar_path: Path
    shape: tuple[int, int, int]
    frame_indices: list[int]
    repeated_frames: bool


def _select_tokens(spec: ExtractionSpec, patches: np.ndarray, global_token: np.ndarray) -> np.ndarray:
    if spec.tokens == "patches_only":
        return patches
    if spec.tokens == "global_only":
        return global_token
    # global token first, then the patch grid
    return np.concatenate([global_token, patches], axis=1)


def extract(
    video_path: str | Path,
    spec: ExtractionSpec,
    out_path: str | Path,
    video_id: str | None = None,
    backbone=None,
) -> ExtractionResult:
    """Extract one clip to an MVFT file plus a ``.meta.json`` sidecar.

    Pass a prebuilt `backbone` to amortize model construction over a batch.
    """
    video_path = Path(video_path)
    out_path = Path(out_path)
    video_id = video_id or video_path.stem
    if backbone is None:
        backbone = build_backbone(spec.backbone)

    frames, indices, repeated = sample_frames(video_path, spec.frames)
    batch = preprocess_frames(frames, backbone.native_resolution, spec.resize_policy)
    patches, global_token = backbone.features(batch)
    features = _select_tokens(spec, patches, global_token)
    write_mvft(video_id, features, out_path)

    sidecar_path = Path(str(out_path) + ".meta.json")
    sidecar = {
        "video_id": video_id,
        "source": str(video_path),
        "backbone": backbone.name,
        "layer": spec.layer,
        "tokens": spec.tokens,
        "resize_policy": spec.resize_policy,
        "native_resolution": backbone.native_resolution,
        "patch_grid": list(backbone.patch_grid),
        "width": backbone.width,
        "frames_requested": spec.frames,
        "frame_indices": indices,
        "repeated_frames": repeated,
        "shape": list(features.shape),
    }
    sidecar_path.write_text(json.dumps(sidecar, indent=2) + "\n")
    return ExtractionResult(
        video_id=video_id,
        mvft_path=out_path,
        sidecar_path=sidecar_path,
        shape=tuple(features.shape),
        frame_indices=indices,
        repeated_frames=repeated,
    )


@dataclass
class BatchSummary:
    extracted: list[dict] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {"extracted": self.extracted, "failures": self.failures}, indent=2
        ) + "\n"


def load_video_manifest(path: str | Path) -> list[dict]:
    """JSON: {"videos": [{"video_id"?: str, "path": str}, ...]}; paths resolve
    against the manifest directory."""
    path = Path(path)
    doc = json.loads(path.read_text())
    videos = doc.get("videos")
    if not isinstance(videos, list):
        raise ExtractorError(f"{path}: expected a top-level 'videos' list")
    out = []
    for i, item in enumerate(videos):
        if "path" not in item:
            raise ExtractorError(f"{path}: videos[{i}] is missing 'path'")
        video_path = Path(item["path"])
        if not video_path.is_absolute():
            video_path = path.parent / video_path
        out.append({"video_id": item.get("video_id"), "path": video_path})
    return out


def extract_batch(
    videos: list[dict],
    spec: ExtractionSpec,
    out_dir: str | Path,
) -> BatchSummary:
    """Per-video extract; failures are listed in the summary, not fatal."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    backbone = build_backbone(spec.backbone)
    summary = BatchSummary()
    for item in videos:
        video_path = Path(item["path"])
        video_id = item.get("video_id") or video_path.stem
        out_path = out_dir / f"{video_id}.mvft"
        try:
            result = extract(video_path, spec, out_path, video_id=video_id, backbone=backbone)
        except (ExtractorError, ValueError, OSError) as exc:
            summary.failures.append({"path": str(video_path), "error": str(exc)})
            continue
        summary.extracted.append(
            {
                "video_id": result.video_id,
                "mvft": str(result.mvft_path),
                "shape": list(result.shape),
                "repeated_frames": result.repeated_frames,
            }
        )
    return summary
