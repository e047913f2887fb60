"""Video decoding and frame selection via OpenCV."""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from .errors import VideoDecodeError
from .sampling import uniform_indices


def count_frames(path: str | Path) -> int:
    capture = cv2.VideoCapture(str(path))
    if not capture.isOpened():
        raise VideoDecodeError(f"cannot open video: {path}")
    try:
        reported = int(capture.get(cv2.CAP_PROP_FRAME_COUNT))
        if reported > 0:
            return reported
        # some containers misreport; fall back to a full scan
        n = 0
        while capture.read()[0]:
            n += 1
        return n
    finally:
        capture.release()


def read_frames(path: str | Path, indices: list[int]) -> list[np.ndarray]:
    """Decode the frames at the given indices as RGB uint8 arrays.

    Decodes sequentially (seeking is codec-dependent) and keeps the frames
    the index list asks for, honoring repetitions.
    """
    wanted = sorted(set(indices))
    capture = cv2.VideoCapture(str(path))
    if not capture.isOpened():
        raise VideoDecodeError(f"cannot open video: {path}")
    grabbed: dict[int, np.ndarray] = {}
    try:
        position = 0
        pending = list(wanted)
        while pending:
            ok, frame = capture.read()
            if not ok:
                break
            if position == pending[0]:
                grabbed[position] = cv2.cvtColor(frame, cv2.COLOR_BGR2RGB)
                pending.pop(0)
            position += 1
    finally:
        capture.release()
    missing = [i for i in indices if i not in grabbed]
    if missing:
        raise VideoDecodeError(f"{path}: could not decode frame indices {missing[:5]}")
    return [grabbed[i] for i in indices]


def sample_frames(path: str | Path, count: int) -> tuple[list[np.ndarray], list[int], bool]:
    """Uniformly sample `count` frames; returns (frames, indices, repeated).

    A clip shorter than `count` is sampled with repetition and flagged.
    """
    total = count_frames(path)
    if total < 1:
        raise VideoDecodeError(f"{path}: no decodable frames")
    repeated = total < count
    indices = uniform_indices(total, count, allow_repetition=True)
    return read_frames(path, indices), indices, repeated
