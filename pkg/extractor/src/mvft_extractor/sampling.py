"""Uniform frame-index selection, pinned to match the engine's formula.

round(i * (total - 1) / (count - 1)) for i = 0..count-1 with
round(x) = floor(x + 1/2) in exact integer arithmetic; count = 1 selects
the middle frame. When the clip has fewer frames than requested, the same
formula runs with repetition allowed (the caller flags a warning).
"""

from __future__ import annotations


def uniform_indices(total: int, count: int, allow_repetition: bool = False) -> list[int]:
    if total < 1 or count < 1:
        raise ValueError(f"need total >= 1 and count >= 1, got {total}, {count}")
    if count > total and not allow_repetition:
        raise ValueError(f"cannot sample {count} frames from {total} without repetition")
    if count == 1:
        return [total // 2]
    step_num = total - 1
    step_den = count - 1
    return [(2 * i * step_num + step_den) // (2 * step_den) for i in range(count)]
