"""Quasi-quadratic pieces: a Taylor model minus a cubic-norm decay term."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from shared.errors import InputError


@dataclass(frozen=True, eq=False)
class QuasiQuadraticPiece:
    """r + <v, D> + D^T S D / 2 - (L/6) |D|^3 with D = x - center."""

    center: np.ndarray
    value: float
    grad: np.ndarray
    hess: np.ndarray
    cubic_L: float = 0.0
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        center = np.asarray(self.center, dtype=float)
        grad = np.asarray(self.grad, dtype=float)
        hess = np.asarray(self.hess, dtype=float)
        d = center.shape[0]
        if grad.shape != (d,) or hess.shape != (d, d):
            raise InputError(f"piece shapes disagree: center {center.shape}, grad {grad.shape}, hess {hess.shape}")
        if self.cubic_L < 0:
            raise InputError(f"cubic_L must be nonnegative, got {self.cubic_L}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "grad", grad)
        object.__setattr__(self, "hess", 0.5 * (hess + hess.T))
        object.__setattr__(self, "cubic_L", float(self.cubic_L))
        object.__setattr__(self, "dim", d)

    @classmethod
    def from_taylor(cls, center: Any, value: float, grad: Any, hess: Any, L: float) -> "QuasiQuadraticPiece":
        """The -(L/3)|D|^3 form of a function with L-Lipschitz Hessian, stored with cubic_L = 2L."""
        return cls(center, value, grad, hess, 2.0 * L)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuasiQuadraticPiece):
            return NotImplemented
        return (
            np.array_equal(self.center, other.center)
            and self.value == other.value
            and np.array_equal(self.grad, other.grad)
            and np.array_equal(self.hess, other.hess)
            and self.cubic_L == other.cubic_L
        )

    def _delta(self, x: Any) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise InputError(f"point has shape {x.shape}, piece has dimension {self.dim}")
        return x - self.center

    def evaluate(self, x: Any) -> float:
        delta = self._delta(x)
        norm = np.linalg.norm(delta)
        return float(
            self.value
            + self.grad @ delta
            + 0.5 * delta @ self.hess @ delta
            - self.cubic_L / 6.0 * norm**3
        )

    def gradient(self, x: Any) -> np.ndarray:
        delta = self._delta(x)
        norm = np.linalg.norm(delta)
        return self.grad + self.hess @ delta - 0.5 * self.cubic_L * norm * delta

    def hessian(self, x: Any) -> np.ndarray:
        delta = self._delta(x)
        norm = np.linalg.norm(delta)
        if norm == 0.0:
            return self.hess.copy()
        outer = np.outer(delta, delta) / norm
        return self.hess - 0.5 * self.cubic_L * (norm * np.eye(self.dim) + outer)
