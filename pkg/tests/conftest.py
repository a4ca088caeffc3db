import numpy as np
import pytest

from fcvt import projection_matrix


def random_design(seed, n, p):
    return np.random.default_rng(seed).standard_normal((n, p))


def random_projection(seed, n, p):
    return projection_matrix(random_design(seed, n, p))


def half2(n):
    """First half of the observations with sigma 1, the rest with sigma 2."""
    return np.where(np.arange(n) < n // 2, 1.0, 2.0)


def rel_err(x, y):
    return abs(x - y) / max(abs(y), 1e-300)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
