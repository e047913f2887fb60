"""Temporal moment statistics and the fused motion embedding.

The representation treats each spatial patch as a d-dimensional time series:
order 1 is the non-central temporal mean, orders k >= 2 are exact two-pass
central moments. Per-patch moments are averaged over the patch axis into one
descriptor per order, the descriptors are optionally unit-normalized, scaled
by their configured weights, fused (concatenation or elementwise sum), and
the fused vector is L2-normalized.

All accumulation is float64 regardless of the float32 payload precision.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace

import numpy as np

from .errors import ContractError, DegenerateEmbeddingError, ValidationError
from .featureio import FeatureTensor
from .sampling import uniform_frame_indices

LEVELS = ("patch", "frame", "patch_diff")
FUSIONS = ("concat", "sum")

# Table-style labels name the patch_diff level "diff-patch".
_LEVEL_LABELS = {"patch": "patch", "frame": "frame", "patch_diff": "diff-patch"}


def _format_weight(w: float) -> str:
    return str(int(w)) if float(w) == int(w) else repr(float(w))


@dataclass(frozen=True)
class MomentConfig:
    """Moment orders, weights, representation level, and fusion mode."""

    orders: int = 3
    weights: tuple[float, ...] = (1.0, 8.0, 4.0)
    level: str = "patch"
    fusion: str = "concat"
    per_moment_normalize: bool = True
    frames: int = 32

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if self.orders < 1:
            raise ValidationError(f"orders must be >= 1, got {self.orders}")
        if len(self.weights) != self.orders:
            raise ValidationError(
                f"expected {self.orders} weights, got {len(self.weights)}"
            )
        if not any(w != 0.0 for w in self.weights):
            raise ValidationError("at least one moment weight must be nonzero")
        if self.level not in LEVELS:
            raise ValidationError(f"level must be one of {LEVELS}, got {self.level!r}")
        if self.fusion not in FUSIONS:
            raise ValidationError(f"fusion must be one of {FUSIONS}, got {self.fusion!r}")
        if self.frames < 1:
            raise ValidationError(f"frames must be >= 1, got {self.frames}")

    def canonical(self) -> str:
        """Canonical key-value serialization used in manifests and CLI flags."""
        weights = ",".join(_format_weight(w) for w in self.weights)
        return (
            f"orders={self.orders};weights={weights};level={self.level};"
            f"fusion={self.fusion};"
            f"per_moment_normalize={'true' if self.per_moment_normalize else 'false'};"
            f"frames={self.frames}"
        )

    @property
    def digest(self) -> str:
        """Stable 16-hex-char hash of the canonical serialization."""
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()[:16]

    def label(self) -> str:
        """Table-style row label, e.g. ``(1,8,4)-patch-concat``."""
        weights = ",".join(_format_weight(w) for w in self.weights)
        return f"({weights})-{_LEVEL_LABELS[self.level]}-{self.fusion}"

    def with_frames(self, frames: int) -> "MomentConfig":
        return replace(self, frames=frames)

    @classmethod
    def from_string(cls, text: str, base: "MomentConfig | None" = None) -> "MomentConfig":
        """Parse the canonical form; keys absent from `text` fall back to `base`."""
        base = base or cls()
        fields: dict = {}
        for part in text.strip().split(";"):
            if not part:
                continue
            if "=" not in part:
                raise ValidationError(f"malformed config item {part!r}: expected key=value")
            key, value = part.split("=", 1)
            key = key.strip()
            value = value.strip()
            if key == "orders":
                fields["orders"] = int(value)
            elif key == "weights":
                try:
                    fields["weights"] = tuple(float(v) for v in value.split(","))
                except ValueError:
                    raise ValidationError(f"malformed weights {value!r}") from None
            elif key in ("level", "fusion"):
                fields[key] = value
            elif key == "per_moment_normalize":
                if value not in ("true", "false"):
                    raise ValidationError(
                        f"per_moment_normalize must be true or false, got {value!r}"
                    )
                fields["per_moment_normalize"] = value == "true"
            elif key == "frames":
                fields["frames"] = int(value)
            else:
                raise ValidationError(f"unknown config key {key!r}")
        if "weights" in fields and "orders" not in fields:
            fields["orders"] = len(fields["weights"])
        merged = {
            "orders": fields.get("orders", base.orders),
            "weights": fields.get("weights", base.weights),
            "level": fields.get("level", base.level),
            "fusion": fields.get("fusion", base.fusion),
            "per_moment_normalize": fields.get(
                "per_moment_normalize", base.per_moment_normalize
            ),
            "frames": fields.get("frames", base.frames),
        }
        return cls(**merged)


@dataclass
class PatchMoments:
    """Order-k temporal moments per patch: a (P, d) float64 matrix."""

    order: int
    values: np.ndarray


@dataclass
class MomentDescriptor:
    """Spatially aggregated order-k moment: one d-vector."""

    order: int
    vector: np.ndarray


@dataclass
class MomentEmbedding:
    """Final fused video descriptor with config provenance."""

    video_id: str
    vector: np.ndarray
    config_digest: str
    normalized: bool = True

    @property
    def dim(self) -> int:
        return self.vector.shape[0]


def temporal_mean(tensor: FeatureTensor) -> PatchMoments:
    """Order-1 moment: per-patch mean over frames, float64 accumulation."""
    values = tensor.data.astype(np.float64).mean(axis=0)
    return PatchMoments(order=1, values=values)


def central_moment(tensor: FeatureTensor, k: int) -> PatchMoments:
    """Order-k central moment per patch, exact two-pass (k >= 2).

    Odd powers of negative deviations keep their sign; k is an integer so
    no complex or NaN cases arise.
    """
    if k < 2:
        raise ContractError(f"central_moment requires k >= 2, got {k} (k=1 is temporal_mean)")
    data = tensor.data.astype(np.float64)
    mu = data.mean(axis=0)
    dev = data - mu
    values = (dev**k).mean(axis=0)
    return PatchMoments(order=k, values=values)


def spatial_aggregate(moments: PatchMoments) -> MomentDescriptor:
    """Unweighted mean over the patch axis."""
    vector = np.asarray(moments.values, dtype=np.float64).mean(axis=0)
    return MomentDescriptor(order=moments.order, vector=vector)


def temporal_difference(tensor: FeatureTensor) -> FeatureTensor:
    """Consecutive forward differences: out[t] = in[t+1] - in[t], shape (T-1, P, d)."""
    if tensor.T < 2:
        raise ContractError("patch_diff requires at least 2 frames")
    diff = tensor.data[1:] - tensor.data[:-1]
    return FeatureTensor(video_id=tensor.video_id + "#diff", data=diff)


def frame_collapse(tensor: FeatureTensor) -> FeatureTensor:
    """Collapse patches to one per frame by arithmetic mean: shape (T, 1, d)."""
    collapsed = tensor.data.astype(np.float64).mean(axis=1, keepdims=True)
    return FeatureTensor(video_id=tensor.video_id, data=collapsed.astype(np.float32))


def subsample_frames(tensor: FeatureTensor, count: int) -> FeatureTensor:
    """Keep `count` uniformly spaced frames (pinned index formula)."""
    if count == tensor.T:
        return tensor
    indices = uniform_frame_indices(tensor.T, count)
    return FeatureTensor(video_id=tensor.video_id, data=tensor.data[indices])


def moment_descriptors(tensor: FeatureTensor, config: MomentConfig) -> list[MomentDescriptor]:
    """Level transform followed by aggregated moments for k = 1..orders."""
    if config.level == "patch_diff":
        if tensor.T < 2:
            raise ContractError("patch_diff requires at least 2 frames")
        working = temporal_difference(tensor)
    elif config.level == "frame":
        working = frame_collapse(tensor)
    else:
        working = tensor
    out = []
    for k in range(1, config.orders + 1):
        pm = temporal_mean(working) if k == 1 else central_moment(working, k)
        out.append(spatial_aggregate(pm))
    return out


def compute_embedding(tensor: FeatureTensor, config: MomentConfig) -> MomentEmbedding:
    """Full pipeline: level transform, moments, weighting, fusion, normalization.

    Raises DegenerateEmbeddingError when the fused vector is exactly zero
    (possible e.g. for constant videos when the order-1 weight is zero).
    """
    descriptors = moment_descriptors(tensor, config)
    blocks = []
    for desc, weight in zip(descriptors, config.weights):
        block = desc.vector
        if config.per_moment_normalize:
            norm = float(np.linalg.norm(block))
            if norm > 0.0:
                block = block / norm
        blocks.append(weight * block)
    if config.fusion == "concat":
        fused = np.concatenate(blocks)
    else:
        fused = np.sum(blocks, axis=0)
    norm = float(np.linalg.norm(fused))
    if norm == 0.0:
        raise DegenerateEmbeddingError(tensor.video_id)
    return MomentEmbedding(
        video_id=tensor.video_id,
        vector=fused / norm,
        config_digest=config.digest,
        normalized=True,
    )
