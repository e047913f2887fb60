"""Frame backbones: published patch grid, feature width, native resolution.

Every backbone maps a batch of preprocessed RGB frames to per-frame patch
tokens plus a global token. Features are stored exactly as emitted, with
no normalization; all statistics live downstream in the engine.

Registry:

* ``pixelgrid``  - deterministic non-learned baseline: 16x16 pixel patches
  average-pooled to 4x4x3 per patch (grid 14x14, width 48). No ML stack.
  Its dimensions are spatially local (sub-block colors), so spatial
  aggregation downstream erases where motion happened; fine for format
  and plumbing work, weak for motion retrieval.
* ``randproj``   - per-position random projections of raw 16x16 patches
  (grid 14x14, width 64, seeded). Each patch position owns its projection,
  so feature axes respond position-specifically and a motion's spatial
  signature survives patch averaging - a training-free stand-in for
  semantic features with globally meaningful dimensions.
* ``vit-random`` - torchvision ViT-B/16 with seeded random weights, final
  encoder layer tokens (grid 14x14, width 768). Exercises the transformer
  path without downloading weights.
* ``dino-v2``    - pretrained DINOv2 ViT-B/14 via torch.hub (grid 16x16,
  width 768). Requires network access to fetch weights; construction
  failures surface as BackboneLoadError.
"""

from __future__ import annotations

import numpy as np

from .errors import BackboneLoadError

_VIT_SEED = 7


class PixelGridBackbone:
    name = "pixelgrid"
    native_resolution = 224
    patch_size = 16
    pool = 4  # each patch is average-pooled to pool x pool x 3

    @property
    def patch_grid(self) -> tuple[int, int]:
        g = self.native_resolution // self.patch_size
        return (g, g)

    @property
    def width(self) -> int:
        return self.pool * self.pool * 3

    def features(self, batch: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(T, H, W, 3) float32 in [0,1] -> patch tokens (T,P,d), global (T,1,d)."""
        T, H, W, _ = batch.shape
        g = self.native_resolution // self.patch_size
        s = self.patch_size // self.pool
        x = batch.reshape(T, g, self.patch_size, g, self.patch_size, 3)
        x = x.transpose(0, 1, 3, 2, 4, 5)              # (T, g, g, ps, ps, 3)
        x = x.reshape(T, g * g, self.pool, s, self.pool, s, 3).mean(axis=(3, 5))
        patches = x.reshape(T, g * g, self.width).astype(np.float32)
        global_token = patches.mean(axis=1, keepdims=True)
        return patches, global_token


class RandProjBackbone:
    name = "randproj"
    native_resolution = 224
    patch_size = 16
    width = 64
    seed = 20

    def __init__(self):
        g = self.native_resolution // self.patch_size
        pixels = self.patch_size * self.patch_size * 3
        rng = np.random.default_rng(self.seed)
        # one projection per patch position, scaled like a JL embedding
        self._proj = rng.normal(
            0.0, 1.0 / np.sqrt(pixels), size=(g * g, self.width, pixels)
        ).astype(np.float32)

    @property
    def patch_grid(self) -> tuple[int, int]:
        g = self.native_resolution // self.patch_size
        return (g, g)

    def features(self, batch: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        T = batch.shape[0]
        g = self.native_resolution // self.patch_size
        ps = self.patch_size
        x = batch.reshape(T, g, ps, g, ps, 3).transpose(0, 1, 3, 2, 4, 5)
        x = x.reshape(T, g * g, ps * ps * 3)
        patches = np.einsum("tpc,pkc->tpk", x, self._proj).astype(np.float32)
        global_token = patches.mean(axis=1, keepdims=True)
        return patches, global_token


class VitBackbone:
    """torchvision ViT-B/16; final encoder layer tokens."""

    patch_size = 16
    native_resolution = 224
    width = 768

    def __init__(self, name: str, pretrained: bool):
        self.name = name
        try:
            import torch
            from torchvision.models import ViT_B_16_Weights, vit_b_16
        except ImportError as exc:
            raise BackboneLoadError(f"{name}: torchvision is not installed: {exc}")
        self._torch = torch
        try:
            if pretrained:
                model = vit_b_16(weights=ViT_B_16_Weights.IMAGENET1K_V1)
            else:
                torch.manual_seed(_VIT_SEED)
                model = vit_b_16(weights=None)
        except Exception as exc:  # weight download or construction failure
            raise BackboneLoadError(f"{name}: failed to build: {exc}") from exc
        self._model = model.eval()

    @property
    def patch_grid(self) -> tuple[int, int]:
        g = self.native_resolution // self.patch_size
        return (g, g)

    def features(self, batch: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        torch = self._torch
        model = self._model
        with torch.no_grad():
            x = torch.from_numpy(batch).permute(0, 3, 1, 2).contiguous()
            x = model._process_input(x)                      # (T, P, width)
            cls = model.class_token.expand(x.shape[0], -1, -1)
            x = torch.cat([cls, x], dim=1)
            tokens = model.encoder(x)                        # final layer, (T, 1+P, width)
        tokens = tokens.numpy().astype(np.float32)
        return tokens[:, 1:, :], tokens[:, :1, :]


class DinoV2Backbone:
    """Pretrained DINOv2 ViT-B/14 through torch.hub; needs network access."""

    name = "dino-v2"
    patch_size = 14
    native_resolution = 224
    width = 768

    def __init__(self):
        try:
            import torch
        except ImportError as exc:
            raise BackboneLoadError(f"dino-v2: torch is not installed: {exc}")
        self._torch = torch
        try:
            self._model = torch.hub.load("facebookresearch/dinov2", "dinov2_vitb14").eval()
        except Exception as exc:
            raise BackboneLoadError(f"dino-v2: failed to load weights: {exc}") from exc

    @property
    def patch_grid(self) -> tuple[int, int]:
        g = self.native_resolution // self.patch_size
        return (g, g)

    def features(self, batch: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        torch = self._torch
        with torch.no_grad():
            x = torch.from_numpy(batch).permute(0, 3, 1, 2).contiguous()
            out = self._model.forward_features(x)
        patches = out["x_norm_patchtokens"].numpy().astype(np.float32)
        global_token = out["x_norm_clstoken"].unsqueeze(1).numpy().astype(np.float32)
        return patches, global_token


def build_backbone(name: str):
    if name == "pixelgrid":
        return PixelGridBackbone()
    if name == "randproj":
        return RandProjBackbone()
    if name == "vit-random":
        return VitBackbone("vit-random", pretrained=False)
    if name == "vit-imagenet":
        return VitBackbone("vit-imagenet", pretrained=True)
    if name == "dino-v2":
        return DinoV2Backbone()
    raise BackboneLoadError(
        f"unknown backbone {name!r}; available: pixelgrid, randproj, "
        f"vit-random, vit-imagenet, dino-v2"
    )


def preprocess_frames(
    frames: list[np.ndarray], resolution: int, resize_policy: str = "resize_center_crop"
) -> np.ndarray:
    """RGB uint8 frames -> (T, resolution, resolution, 3) float32 in [0, 1]."""
    import cv2

    out = np.empty((len(frames), resolution, resolution, 3), dtype=np.float32)
    for i, frame in enumerate(frames):
        h, w = frame.shape[:2]
        if resize_policy == "stretch":
            resized = cv2.resize(frame, (resolution, resolution), interpolation=cv2.INTER_AREA)
        elif resize_policy == "resize_center_crop":
            scale = resolution / min(h, w)
            new_w, new_h = round(w * scale), round(h * scale)
            resized = cv2.resize(frame, (new_w, new_h), interpolation=cv2.INTER_AREA)
            top = (new_h - resolution) // 2
            left = (new_w - resolution) // 2
            resized = resized[top : top + resolution, left : left + resolution]
        else:
            raise ValueError(f"unknown resize policy {resize_policy!r}")
        out[i] = resized.astype(np.float32) / 255.0
    return out
