import numpy as np
import pytest

from videomoments import FeatureTensor


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_tensor(rng, video_id="vid", T=None, P=None, d=None, scale=1.0):
    T = T or int(rng.integers(1, 17))
    P = P or int(rng.integers(1, 9))
    d = d or int(rng.integers(1, 17))
    data = rng.normal(0.0, scale, size=(T, P, d)).astype(np.float32)
    return FeatureTensor(video_id=video_id, data=data)
