"""Flat LP coordinates of a program instance.

Order: r, then r_i for every center, then v_i (d entries each), then the
upper triangle of every Sigma_i, row-major.
"""
from __future__ import annotations

import numpy as np

from synthesis.models import ProgramInstance


def triangle_size(dim: int) -> int:
    return dim * (dim + 1) // 2


def quadratic_basis(deltas: np.ndarray) -> np.ndarray:
    """Rows b(D) with b(D) . upper(S) = D^T S D."""
    deltas = np.atleast_2d(deltas)
    dim = deltas.shape[1]
    rows, cols = np.triu_indices(dim)
    weights = np.where(rows == cols, 1.0, 2.0)
    return deltas[:, rows] * deltas[:, cols] * weights


def upper_triangle(matrix: np.ndarray) -> np.ndarray:
    rows, cols = np.triu_indices(matrix.shape[0])
    return matrix[rows, cols]


class InstanceLayout:
    def __init__(self, n_centers: int, dim: int):
        self.n_centers = n_centers
        self.dim = dim
        self.tri = triangle_size(dim)
        self._grad_start = 1 + n_centers
        self._sigma_start = self._grad_start + n_centers * dim
        self.size = self._sigma_start + n_centers * self.tri

    r_index = 0

    def value_index(self, i: int) -> int:
        return 1 + i

    def grad_indices(self, i: int) -> np.ndarray:
        start = self._grad_start + i * self.dim
        return np.arange(start, start + self.dim)

    def sigma_indices(self, i: int) -> np.ndarray:
        start = self._sigma_start + i * self.tri
        return np.arange(start, start + self.tri)

    def bounds(self, c2: float) -> list[tuple[float | None, float | None]]:
        """Box bounds on Sigma entries keep every relaxation bounded."""
        free = [(None, None)] * self._sigma_start
        return free + [(-c2, c2)] * (self.n_centers * self.tri)

    def pack(self, instance: ProgramInstance) -> np.ndarray:
        vector = np.empty(self.size)
        vector[0] = instance.r
        vector[1 : self._grad_start] = instance.values
        vector[self._grad_start : self._sigma_start] = instance.grads.reshape(-1)
        rows, cols = np.triu_indices(self.dim)
        vector[self._sigma_start :] = instance.hessians[:, rows, cols].reshape(-1)
        return vector

    def unpack(self, vector: np.ndarray) -> ProgramInstance:
        n, d = self.n_centers, self.dim
        uppers = vector[self._sigma_start :].reshape(n, self.tri)
        hessians = np.zeros((n, d, d))
        rows, cols = np.triu_indices(d)
        hessians[:, rows, cols] = uppers
        hessians[:, cols, rows] = uppers
        return ProgramInstance(
            r=float(vector[0]),
            values=vector[1 : self._grad_start].copy(),
            grads=vector[self._grad_start : self._sigma_start].reshape(n, d).copy(),
            hessians=hessians,
        )
