"""Feature file format: round trips, named parse errors, diagnostics."""

import io

import numpy as np
import pytest

from videomoments import (
    BadMagicError,
    FeatureTensor,
    ShapeMismatchError,
    TrailingDataError,
    TruncatedPayloadError,
    UnsupportedVersionError,
    ValidationError,
    read_feature_file,
    validate,
    write_feature_file,
)
from videomoments.errors import FeatureFormatError

from conftest import random_tensor


def roundtrip(tensor):
    buf = io.BytesIO()
    write_feature_file(tensor, buf)
    buf.seek(0)
    return read_feature_file(buf)


def serialized(tensor):
    buf = io.BytesIO()
    write_feature_file(tensor, buf)
    return buf.getvalue()


class TestWrite:
    def test_smallest_legal_tensor_payload(self):
        tensor = FeatureTensor("tiny", np.array([[[1.0, 2.0]]], dtype=np.float32))
        raw = serialized(tensor)
        # 24-byte fixed header + 4-byte id + 8 payload bytes
        assert len(raw) == 24 + 4 + 8
        assert raw[:4] == b"MVFT"
        assert raw[-8:] == np.array([1.0, 2.0], dtype="<f4").tobytes()

    def test_byte_count_matches_format_arithmetic(self):
        tensor = FeatureTensor("big", np.zeros((32, 256, 768), dtype=np.float32))
        buf = io.BytesIO()
        n = write_feature_file(tensor, buf)
        assert n == 24 + 3 + 4 * 32 * 256 * 768
        assert n - (24 + 3) == 25_165_824

    def test_nan_refused_nothing_written(self):
        data = np.ones((2, 2, 2), dtype=np.float32)
        data[1, 1, 1] = np.nan
        tensor = FeatureTensor("bad", data)
        buf = io.BytesIO()
        with pytest.raises(ValidationError):
            write_feature_file(tensor, buf)
        assert buf.getvalue() == b""


class TestRead:
    def test_roundtrip_identity(self, rng):
        for i in range(20):
            tensor = random_tensor(rng, video_id=f"vid-{i}-é中")
            back = roundtrip(tensor)
            assert back == tensor

    def test_roundtrip_bitwise_payload(self, rng):
        tensor = random_tensor(rng, T=5, P=3, d=7)
        raw = serialized(tensor)
        back = read_feature_file(io.BytesIO(raw))
        assert serialized(back) == raw

    def test_bad_magic(self):
        with pytest.raises(BadMagicError):
            read_feature_file(io.BytesIO(b"NOPE" + b"\x00" * 100))

    def test_unsupported_version(self, rng):
        raw = bytearray(serialized(random_tensor(rng, T=2, P=1, d=2)))
        raw[4] = 9
        with pytest.raises(UnsupportedVersionError):
            read_feature_file(io.BytesIO(bytes(raw)))

    def test_truncated_payload(self, rng):
        raw = serialized(random_tensor(rng, T=2, P=2, d=2))
        with pytest.raises(TruncatedPayloadError):
            read_feature_file(io.BytesIO(raw[:-4]))

    def test_zero_shape_rejected(self, rng):
        raw = bytearray(serialized(random_tensor(rng, T=2, P=1, d=2)))
        raw[8:12] = (0).to_bytes(4, "little")  # T = 0
        with pytest.raises(ShapeMismatchError):
            read_feature_file(io.BytesIO(bytes(raw)))

    def test_shape_lie_does_not_allocate(self, rng):
        raw = bytearray(serialized(random_tensor(rng, T=2, P=1, d=2)))
        raw[8:12] = (0xFFFFFFFF).to_bytes(4, "little")  # claims ~4e9 frames
        with pytest.raises(TruncatedPayloadError):
            read_feature_file(io.BytesIO(bytes(raw)))

    def test_trailing_data_rejected(self, rng):
        raw = serialized(random_tensor(rng, T=2, P=1, d=2))
        with pytest.raises(TrailingDataError):
            read_feature_file(io.BytesIO(raw + b"\x00"))

    def test_nonfinite_payload_rejected(self, rng):
        raw = bytearray(serialized(random_tensor(rng, T=1, P=1, d=1)))
        raw[-4:] = np.array([np.inf], dtype="<f4").tobytes()
        with pytest.raises(ValidationError):
            read_feature_file(io.BytesIO(bytes(raw)))

    def test_empty_stream(self):
        with pytest.raises(BadMagicError):
            read_feature_file(io.BytesIO(b""))


class TestValidate:
    def test_all_zeros(self):
        tensor = FeatureTensor("z", np.zeros((2, 2, 2), dtype=np.float32))
        diag = validate(tensor)
        assert diag.finite
        assert diag.issues == []
        assert diag.min == diag.max == diag.mean == 0.0
        assert diag.shape == (2, 2, 2)

    def test_single_inf_names_flat_index(self):
        data = np.zeros((2, 2, 2), dtype=np.float32)
        data[1, 0, 1] = np.inf  # flat index 5
        diag = validate(FeatureTensor("inf", data))
        assert not diag.finite
        assert len(diag.issues) == 1
        assert "flat index 5" in diag.issues[0]
        assert "Inf" in diag.issues[0]

    def test_random_tensor_clean(self, rng):
        for _ in range(10):
            tensor = random_tensor(rng)
            diag = validate(tensor)
            assert diag.finite
            assert diag.issues == []
            # direct scan oracle
            assert diag.min == float(tensor.data.min())
            assert diag.max == float(tensor.data.max())
            assert abs(diag.mean - float(tensor.data.mean(dtype=np.float64))) < 1e-12

    def test_many_bad_values_capped(self):
        data = np.full((4, 4, 4), np.nan, dtype=np.float32)
        diag = validate(FeatureTensor("nan", data))
        assert not diag.finite
        assert any("more non-finite" in issue for issue in diag.issues)


class TestConstruction:
    def test_wrong_ndim(self):
        with pytest.raises(ValidationError):
            FeatureTensor("x", np.zeros((2, 2), dtype=np.float32))

    def test_zero_dim(self):
        with pytest.raises(ValidationError):
            FeatureTensor("x", np.zeros((0, 2, 2), dtype=np.float32))

    def test_coerces_to_float32(self):
        tensor = FeatureTensor("x", np.ones((1, 1, 1), dtype=np.float64))
        assert tensor.data.dtype == np.float32


class TestFuzz:
    """Light fuzz here; the 10k-case campaign lives in the acceptance suite."""

    def test_mutations_never_crash(self, rng):
        base = serialized(random_tensor(rng, T=3, P=2, d=4))
        for _ in range(500):
            raw = bytearray(base)
            op = rng.integers(0, 3)
            if op == 0:
                raw = raw[: rng.integers(0, len(raw))]
            elif op == 1:
                pos = int(rng.integers(0, len(raw)))
                raw[pos] ^= 1 << int(rng.integers(0, 8))
            else:
                pos = int(rng.integers(8, 24))
                raw[pos : pos + 4] = int(rng.integers(0, 2**32)).to_bytes(4, "little")
            try:
                tensor = read_feature_file(io.BytesIO(bytes(raw)))
            except (FeatureFormatError, ValidationError):
                continue
            # accepted: must be the canonical encoding of the result
            assert serialized(tensor) == bytes(raw)
            assert tensor.is_finite()
