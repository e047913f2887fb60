"""Deterministic planted-signal datasets for desk-scale verification.

Each generated video combines two independent factors:

* an appearance component: a (P, d) pattern shared by every video in the
  same *visual cluster*, constant over time, so it reaches only the
  order-1 (mean) channel;
* a motion component: a zero-mean temporal waveform whose amplitude,
  frequency, and asymmetry are fixed per *motion group*, injected along a
  feature direction. It carries no order-1 signal and encodes identity in
  the order-2/3 channels.

Motion directions have two levels. Every video's direction is the group's
core direction plus a per-execution perturbation, so videos of one group
cluster together without being interchangeable. A triplet consists of
three dedicated videos: the reference, a positive sharing the reference's
exact execution (direction and patch gains) but a different visual
cluster, and a hard negative sharing the reference's visual cluster but a
different motion group. Closest-video retrieval in the motion channels
therefore has exactly one best answer per query.

Everything derives from one integer seed; regenerating with the same
parameters is bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError
from .featureio import FeatureTensor, write_feature_path
from .manifest import CATEGORIES, BenchmarkManifest, ManifestEntry, load_manifest, save_manifest

DEFAULT_NOISE = 0.02
_MAX_CYCLES = 3
_EXECUTION_SPREAD = 0.5  # perturbation scale of per-execution motion directions


@dataclass
class SyntheticParams:
    seed: int = 7
    groups: int = 20
    per_group: int = 5
    frames: int = 32
    patches: int = 4
    dim: int = 16
    appearance_confound: float = 1.0
    motion_signal: float = 1.0
    noise_scale: float = DEFAULT_NOISE

    def __post_init__(self):
        if self.groups < 2 or self.per_group < 2:
            raise ContractError("need groups >= 2 and per_group >= 2")
        if min(self.frames, self.patches, self.dim) < 1:
            raise ContractError("frames, patches, dim must each be >= 1")
        if self.appearance_confound < 0 or self.motion_signal < 0:
            raise ContractError("signal scales must be nonnegative")


def _group_waveform(group: int, groups: int, frames: int) -> np.ndarray:
    """Zero-sum temporal waveform; amplitude/frequency/asymmetry encode the group."""
    spread = np.linspace(0.0, 1.0, groups)[group]
    amplitude = 1.0 + spread                      # [1, 2]
    skew = -0.8 + 1.6 * spread                    # [-0.8, 0.8]
    cycles = 1 + group % _MAX_CYCLES              # bounded bandwidth
    t = (np.arange(frames, dtype=np.float64) + 0.5) / frames
    base = np.sin(2.0 * np.pi * cycles * t)
    curve = base + skew * base**2
    curve -= curve.mean()
    return amplitude * curve


def _shared_fields(params: SyntheticParams, rng: np.random.Generator):
    appearance = rng.normal(0.0, 1.0, size=(params.groups, params.patches, params.dim))
    core = rng.normal(0.0, 1.0, size=(params.groups, params.dim))
    core /= np.linalg.norm(core, axis=1, keepdims=True)
    waveforms = np.stack(
        [_group_waveform(g, params.groups, params.frames) for g in range(params.groups)]
    )
    return appearance, core, waveforms


def _execution(params: SyntheticParams, rng: np.random.Generator, core: np.ndarray, group: int):
    """One motion execution: perturbed group direction plus patch gains."""
    wobble = rng.normal(0.0, 1.0, size=params.dim)
    wobble /= np.linalg.norm(wobble)
    direction = core[group] + _EXECUTION_SPREAD * wobble
    direction /= np.linalg.norm(direction)
    gains = rng.uniform(0.5, 1.5, size=params.patches)
    return direction, gains


def _render_video(
    params: SyntheticParams,
    rng: np.random.Generator,
    fields,
    video_id: str,
    cluster: int,
    group: int,
    direction: np.ndarray,
    gains: np.ndarray,
) -> FeatureTensor:
    appearance, _, waveforms = fields
    motion = (
        waveforms[group][:, None, None]
        * gains[None, :, None]
        * direction[None, None, :]
    )
    noise = rng.normal(
        0.0, params.noise_scale, size=(params.frames, params.patches, params.dim)
    )
    data = (
        params.appearance_confound * appearance[cluster][None, :, :]
        + params.motion_signal * motion
        + noise
    )
    return FeatureTensor(video_id=video_id, data=data.astype(np.float32))


def _metadata(params: SyntheticParams) -> dict:
    return {
        "seed": params.seed,
        "groups": params.groups,
        "per_group": params.per_group,
        "frames": params.frames,
        "patches": params.patches,
        "dim": params.dim,
        "appearance_confound": params.appearance_confound,
        "motion_signal": params.motion_signal,
        "noise_scale": params.noise_scale,
        "waveform_max_cycles": _MAX_CYCLES,
    }


def generate_synthetic(
    out_dir: str | Path,
    seed: int = 7,
    groups: int = 20,
    per_group: int = 5,
    frames: int = 32,
    patches: int = 4,
    dim: int = 16,
    appearance_confound: float = 1.0,
    motion_signal: float = 1.0,
    noise_scale: float = DEFAULT_NOISE,
) -> tuple[BenchmarkManifest, Path]:
    """Write a planted triplet benchmark (MVFT files + manifest) under out_dir.

    groups x per_group triplets, three dedicated videos each. Video ids
    encode the video's own motion group (``vid-g03-t0015-pos``). Categories
    rotate through the five edit-category labels. Returns the loaded
    manifest and its path.
    """
    params = SyntheticParams(
        seed=seed, groups=groups, per_group=per_group, frames=frames,
        patches=patches, dim=dim, appearance_confound=appearance_confound,
        motion_signal=motion_signal, noise_scale=noise_scale,
    )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(params.seed)
    fields = _shared_fields(params, rng)
    _, core, _ = fields

    entries: list[ManifestEntry] = []
    n_triplets = params.groups * params.per_group
    for i in range(n_triplets):
        group = i // params.per_group
        ref_cluster = i % params.groups
        pos_cluster = (ref_cluster + 1 + i % (params.groups - 1)) % params.groups
        neg_group = (group + 1 + i % (params.groups - 1)) % params.groups
        direction, gains = _execution(params, rng, core, group)
        neg_direction, neg_gains = _execution(params, rng, core, neg_group)
        tid = f"triplet-{i:04d}"
        category = CATEGORIES[i % len(CATEGORIES)]
        spec = [
            (f"vid-g{group:02d}-t{i:04d}-ref", ref_cluster, group, direction, gains, "reference"),
            (f"vid-g{group:02d}-t{i:04d}-pos", pos_cluster, group, direction, gains, "positive"),
            (f"vid-g{neg_group:02d}-t{i:04d}-neg", ref_cluster, neg_group, neg_direction, neg_gains, "negative"),
        ]
        for video_id, cluster, vid_group, vid_dir, vid_gains, role in spec:
            tensor = _render_video(
                params, rng, fields, video_id, cluster, vid_group, vid_dir, vid_gains
            )
            path = out_dir / f"{video_id}.mvft"
            write_feature_path(tensor, path)
            entries.append(
                ManifestEntry(
                    video_id=video_id,
                    feature_path=path,
                    role=role,
                    triplet_id=tid,
                    category=category,
                )
            )

    manifest = BenchmarkManifest(
        name=f"planted-triplets-seed{params.seed}",
        kind="triplet_synthetic",
        entries=entries,
        metadata=_metadata(params),
    )
    manifest_path = out_dir / "manifest.json"
    save_manifest(manifest, manifest_path)
    return load_manifest(manifest_path), manifest_path


def generate_labeled_synthetic(
    out_dir: str | Path,
    seed: int = 7,
    classes: int = 3,
    per_class: int = 20,
    frames: int = 32,
    patches: int = 4,
    dim: int = 16,
    appearance_confound: float = 1.0,
    motion_signal: float = 1.0,
    noise_scale: float = DEFAULT_NOISE,
) -> tuple[BenchmarkManifest, Path]:
    """Write a planted labeled set for kNN evaluation under out_dir.

    Labels are the motion groups; slots alternate between gallery and query
    so both splits are class-balanced. Visual clusters rotate across slots,
    spreading the appearance confound over all classes.
    """
    params = SyntheticParams(
        seed=seed, groups=classes, per_group=per_class, frames=frames,
        patches=patches, dim=dim, appearance_confound=appearance_confound,
        motion_signal=motion_signal, noise_scale=noise_scale,
    )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(params.seed)
    fields = _shared_fields(params, rng)
    _, core, _ = fields

    entries: list[ManifestEntry] = []
    for group in range(params.groups):
        for slot in range(params.per_group):
            direction, gains = _execution(params, rng, core, group)
            cluster = (group + slot) % params.groups
            video_id = f"vid-g{group:02d}-{slot:02d}"
            tensor = _render_video(
                params, rng, fields, video_id, cluster, group, direction, gains
            )
            path = out_dir / f"{video_id}.mvft"
            write_feature_path(tensor, path)
            entries.append(
                ManifestEntry(
                    video_id=video_id,
                    feature_path=path,
                    role="gallery" if slot % 2 == 0 else "query",
                    label=f"class-{group:02d}",
                )
            )

    manifest = BenchmarkManifest(
        name=f"planted-labels-seed{params.seed}",
        kind="labeled_knn",
        entries=entries,
        metadata=_metadata(params),
    )
    manifest_path = out_dir / "manifest.json"
    save_manifest(manifest, manifest_path)
    return load_manifest(manifest_path), manifest_path
