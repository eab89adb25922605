import os

import hypothesis
import numpy as np
import pytest

from convex_sets import euclidean_ball
from regularizer import PiecewiseRegularizer, QuasiQuadraticPiece

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=20, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=200, deadline=None, derandomize=True)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))


class Quadratic:
    """(k/2) |x - a|^2 as a value/subgradient view."""

    globally_defined = True

    def __init__(self, dim: int, k: float = 1.0, shift=None):
        self.dim = dim
        self.k = k
        self.shift = np.zeros(dim) if shift is None else np.asarray(shift, dtype=float)

    def value(self, x):
        d = np.asarray(x, dtype=float) - self.shift
        return 0.5 * self.k * float(d @ d)

    def subgradient(self, x):
        return self.k * (np.asarray(x, dtype=float) - self.shift)


class QuarticSum:
    """sum_k x_k^4, Hessian 24-Lipschitz on [-1, 1]^d"""

    globally_defined = True
    hessian_lipschitz = 24.0

    def __init__(self, dim: int):
        self.dim = dim

    def value(self, x):
        return float(np.sum(np.asarray(x) ** 4))

    def subgradient(self, x):
        return 4.0 * np.asarray(x, dtype=float) ** 3

    def hessian(self, x):
        return np.diag(12.0 * np.asarray(x, dtype=float) ** 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ball2():
    return euclidean_ball(2)


@pytest.fixture
def half_norm_squared():
    return Quadratic(2)


def quadratic_regularizer(centers, k: float = 1.0, cubic_L: float = 0.0, alpha: float = 1.0) -> PiecewiseRegularizer:
    """Pieces carrying the exact Taylor data of (k/2)|x|^2 at each center."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    d = centers.shape[1]
    pieces = [
        QuasiQuadraticPiece(center=c, value=0.5 * k * float(c @ c), grad=k * c, hess=k * np.eye(d), cubic_L=cubic_L)
        for c in centers
    ]
    return PiecewiseRegularizer(pieces=tuple(pieces), alpha=alpha)


@pytest.fixture
def log_records():
    """Loguru records emitted during the test."""
    from shared.core import logger

    captured = []
    handler = logger.add(lambda message: captured.append(message.record), level="DEBUG")
    yield captured
    logger.remove(handler)
