"""Uniform temporal subsampling.

The index formula is pinned so that feature extraction and in-engine frame
sweeps select identical frames: round(i * (total - 1) / (count - 1)) for
i = 0..count-1, with round(x) = floor(x + 1/2) evaluated in exact integer
arithmetic. count = 1 selects the middle frame.
"""

from __future__ import annotations

from .errors import ContractError


def uniform_frame_indices(total: int, count: int) -> list[int]:
    """Indices of `count` uniformly spaced frames out of `total`."""
    if total < 1:
        raise ContractError(f"total frames must be >= 1, got {total}")
    if count < 1:
        raise ContractError(f"frame count must be >= 1, got {count}")
    if count > total:
        raise ContractError(f"cannot sample {count} frames from {total} without repetition")
    if count == 1:
        return [total // 2]  # == round((total-1)/2): the middle frame
    step_num = total - 1
    step_den = count - 1
    return [(2 * i * step_num + step_den) // (2 * step_den) for i in range(count)]
