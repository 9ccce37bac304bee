import numpy as np
import pytest

from cascade_lab import backend


@pytest.fixture
def numpy_backend():
    prev = backend.set_backend("numpy")
    yield
    backend.set_backend(prev)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(20240811))
