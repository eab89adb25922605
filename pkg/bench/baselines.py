"""Baseline regularizers with closed-form FTRL steps."""
from __future__ import annotations

import math

import numpy as np
from scipy.special import softmax, xlogy

from convex_sets.bodies import ConvexBody
from shared.errors import BaselineDomainError
from shared.models import BaselineKind, BodyKind

# keeps log finite at the simplex boundary
_ENTROPY_FLOOR = 1e-300


class QuadraticRegularizer:
    """(c/2) |x|^2"""

    kind = BaselineKind.QUADRATIC
    globally_defined = True

    def __init__(self, dim: int, c: float = 1.0):
        self.dim = dim
        self.c = c

    def __repr__(self) -> str:
        return f"QuadraticRegularizer(dim={self.dim}, c={self.c:g})"

    def value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return 0.5 * self.c * float(x @ x)

    def subgradient(self, x: np.ndarray) -> np.ndarray:
        return self.c * np.asarray(x, dtype=float)

    def value_range(self) -> float | None:
        return None

    def argmin_linear(self, linear: np.ndarray, weight: float, action_set: ConvexBody) -> np.ndarray | None:
        """Projection of -linear / (weight c); None when the body has no closed-form projection."""
        return action_set.project(-np.asarray(linear, dtype=float) / (weight * self.c))


class EntropyRegularizer:
    """Negative entropy sum x_k log x_k, defined on the simplex only."""

    kind = BaselineKind.ENTROPY
    globally_defined = False

    def __init__(self, dim: int):
        self.dim = dim

    def __repr__(self) -> str:
        return f"EntropyRegularizer(dim={self.dim})"

    def value(self, x: np.ndarray) -> float:
        return float(np.sum(xlogy(x, x)))

    def subgradient(self, x: np.ndarray) -> np.ndarray:
        return 1.0 + np.log(np.maximum(np.asarray(x, dtype=float), _ENTROPY_FLOOR))

    def value_range(self) -> float:
        return math.log(self.dim)

    def argmin_linear(self, linear: np.ndarray, weight: float, action_set: ConvexBody) -> np.ndarray:
        require_simplex(action_set)
        return softmax(-np.asarray(linear, dtype=float) / weight)


def require_simplex(action_set: ConvexBody) -> None:
    if action_set.kind is not BodyKind.SIMPLEX:
        raise BaselineDomainError(f"entropy regularizer needs a simplex action set, got {action_set.kind.value}")


def build_baseline(kind: BaselineKind | str, action_set: ConvexBody, c: float = 1.0) -> QuadraticRegularizer | EntropyRegularizer:
    kind = BaselineKind(kind)
    if kind is BaselineKind.ENTROPY:
        require_simplex(action_set)
        return EntropyRegularizer(action_set.dim)
    return QuadraticRegularizer(action_set.dim, c)
