import math

import cv2
import numpy as np
import pytest

SIZE = 96

# four motion patterns (distinct trajectories and regions) x three
# appearance variants (colors change, the moving structure does not)
MOTIONS = ("slide-x", "slide-y", "pulse", "orbit")
APPEARANCES = (
    {"bg": (24, 24, 32), "fg": (230, 230, 230)},
    {"bg": (60, 30, 20), "fg": (90, 180, 240)},
    {"bg": (18, 48, 26), "fg": (240, 200, 80)},
)


def _frame(motion: str, appearance: dict, t: float) -> np.ndarray:
    """One RGB frame of a moving square; t in [0, 1)."""
    img = np.zeros((SIZE, SIZE, 3), dtype=np.uint8)
    img[:] = appearance["bg"]
    phase = 2.0 * math.pi * t
    half = 10
    if motion == "slide-x":      # horizontal sweep along the top band
        cx, cy = int(20 + 56 * (0.5 + 0.5 * math.sin(2 * phase))), 20
    elif motion == "slide-y":    # vertical sweep along the right band
        cx, cy = 76, int(20 + 56 * (0.5 + 0.5 * math.sin(2 * phase)))
    elif motion == "pulse":      # size pulsing at bottom-left
        cx, cy = 24, 72
        half = int(5 + 13 * (0.5 + 0.5 * math.sin(2 * phase)))
    elif motion == "orbit":      # wide circular path
        cx = int(SIZE / 2 + 34 * math.cos(phase))
        cy = int(SIZE / 2 + 34 * math.sin(phase))
    else:
        raise ValueError(motion)
    cv2.rectangle(img, (cx - half, cy - half), (cx + half, cy + half),
                  appearance["fg"], thickness=-1)
    return img


def render_clip(path, motion: str, appearance: dict, frames: int = 80, fps: int = 16):
    writer = cv2.VideoWriter(
        str(path), cv2.VideoWriter_fourcc(*"mp4v"), fps, (SIZE, SIZE)
    )
    assert writer.isOpened(), f"cannot open video writer for {path}"
    for i in range(frames):
        rgb = _frame(motion, appearance, i / frames)
        writer.write(cv2.cvtColor(rgb, cv2.COLOR_RGB2BGR))
    writer.release()
    return path


@pytest.fixture(scope="session")
def clip_80(tmp_path_factory):
    """One 80-frame test clip, shared across tests."""
    path = tmp_path_factory.mktemp("clips") / "slide.mp4"
    return render_clip(path, "slide-x", APPEARANCES[0], frames=80)


@pytest.fixture(scope="session")
def short_clip(tmp_path_factory):
    """A clip with fewer frames than the default sampling request."""
    path = tmp_path_factory.mktemp("clips") / "short.mp4"
    return render_clip(path, "pulse", APPEARANCES[1], frames=9)


@pytest.fixture(scope="session")
def three_clips(tmp_path_factory):
    base = tmp_path_factory.mktemp("clips3")
    return [
        render_clip(base / f"clip{i}.mp4", motion, APPEARANCES[i], frames=80)
        for i, motion in enumerate(("slide-x", "pulse", "orbit"))
    ]


@pytest.fixture(scope="session")
def motion_group_clips(tmp_path_factory):
    """12 clips: 4 motion groups x 3 visually distinct variants."""
    base = tmp_path_factory.mktemp("groups")
    clips = []
    for motion in MOTIONS:
        for v, appearance in enumerate(APPEARANCES):
            path = base / f"{motion}-v{v}.mp4"
            render_clip(path, motion, appearance, frames=80)
            clips.append({"path": path, "motion": motion, "variant": v})
    return clips
