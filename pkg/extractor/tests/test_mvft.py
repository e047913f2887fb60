"""MVFT writer: exact byte layout and input validation."""

import numpy as np
import pytest

from mvft_extractor.mvft import read_mvft_header, write_mvft


def test_layout(tmp_path):
    features = np.arange(2 * 3 * 4, dtype=np.float32).reshape(2, 3, 4)
    path = tmp_path / "x.mvft"
    n = write_mvft("clip-a", features, path)
    raw = path.read_bytes()
    assert len(raw) == n == 24 + 6 + 2 * 3 * 4 * 4
    assert raw[:4] == b"MVFT"
    assert int.from_bytes(raw[4:8], "little") == 1
    assert int.from_bytes(raw[8:12], "little") == 2
    assert int.from_bytes(raw[12:16], "little") == 3
    assert int.from_bytes(raw[16:20], "little") == 4
    assert int.from_bytes(raw[20:24], "little") == 6
    assert raw[24:30] == b"clip-a"
    back = np.frombuffer(raw[30:], dtype="<f4").reshape(2, 3, 4)
    assert np.array_equal(back, features)


def test_header_reader(tmp_path):
    path = tmp_path / "y.mvft"
    write_mvft("vid-y", np.zeros((5, 2, 7), dtype=np.float32), path)
    header = read_mvft_header(path)
    assert header == {"video_id": "vid-y", "T": 5, "P": 2, "d": 7}


def test_nonfinite_rejected(tmp_path):
    bad = np.full((1, 1, 2), np.nan, dtype=np.float32)
    with pytest.raises(ValueError, match="non-finite"):
        write_mvft("bad", bad, tmp_path / "bad.mvft")
    assert not (tmp_path / "bad.mvft").exists()


def test_wrong_shape_rejected(tmp_path):
    with pytest.raises(ValueError, match="T, P, d"):
        write_mvft("bad", np.zeros((2, 2), dtype=np.float32), tmp_path / "bad.mvft")
