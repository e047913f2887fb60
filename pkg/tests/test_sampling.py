"""Pinned uniform-subsampling formula, including the extractor-shared goldens."""

import pytest

from videomoments import ContractError, uniform_frame_indices

# Golden vectors shared with the feature extractor's test suite. Do not
# regenerate from the implementation; these freeze the formula itself.
GOLDEN_80_TO_32 = [
    0, 3, 5, 8, 10, 13, 15, 18, 20, 23, 25, 28, 31, 33, 36, 38,
    41, 43, 46, 48, 51, 54, 56, 59, 61, 64, 66, 69, 71, 74, 76, 79,
]


def test_t10_n4():
    assert uniform_frame_indices(10, 4) == [0, 3, 6, 9]


def test_identity_when_equal():
    assert uniform_frame_indices(7, 7) == list(range(7))


def test_endpoints_included():
    for total in (2, 5, 17, 100):
        for count in (2, 3, min(total, 9)):
            if count > total:
                continue
            indices = uniform_frame_indices(total, count)
            assert indices[0] == 0
            assert indices[-1] == total - 1
            assert indices == sorted(indices)


def test_single_frame_is_middle():
    assert uniform_frame_indices(10, 1) == [5]
    assert uniform_frame_indices(9, 1) == [4]
    assert uniform_frame_indices(1, 1) == [0]


def test_golden_80_to_32():
    assert uniform_frame_indices(80, 32) == GOLDEN_80_TO_32


def test_count_exceeds_total():
    with pytest.raises(ContractError):
        uniform_frame_indices(4, 5)


def test_bad_arguments():
    with pytest.raises(ContractError):
        uniform_frame_indices(0, 1)
    with pytest.raises(ContractError):
        uniform_frame_indices(4, 0)
