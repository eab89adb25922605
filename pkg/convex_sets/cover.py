"""Deterministic sphere covers from normalized cube-lattice points."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from shared.config import settings
from shared.errors import ConfigValidationError, ResourceError


@dataclass(frozen=True)
class SphereCover:
    dim: int
    resolution: float
    directions: np.ndarray

    def __len__(self) -> int:
        return len(self.directions)

    def hemisphere(self) -> "SphereCover":
        """One of each ±v pair: keep directions whose first nonzero coordinate is positive."""
        nonzero = np.abs(self.directions) > 1e-12
        first = np.argmax(nonzero, axis=1)
        keep = self.directions[np.arange(len(self)), first] > 0
        return SphereCover(self.dim, self.resolution, self.directions[keep])

    def audit(self, samples: int = 10_000, seed: int = 0) -> float:
        """Largest distance from a random unit vector to its nearest cover point"""
        rng = np.random.default_rng(seed)
        draws = rng.standard_normal((samples, self.dim))
        draws /= np.linalg.norm(draws, axis=1, keepdims=True)
        distances, _ = cKDTree(self.directions).query(draws)
        return float(distances.max())


def cover_size_estimate(dim: int, eps_tilde: float) -> tuple[int, int]:
    """(lattice intervals per axis, number of boundary lattice points)"""
    if dim == 1:
        return 1, 2
    # spacing 2/n <= eps/sqrt(d-1), so every face point is within eps/2 of the lattice
    n = max(1, math.ceil(2.0 * math.sqrt(dim - 1) / eps_tilde))
    return n, (n + 1) ** dim - max(n - 1, 0) ** dim


def sphere_cover(dim: int, eps_tilde: float) -> SphereCover:
    if dim < 1:
        raise ConfigValidationError(f"sphere cover needs dim >= 1, got {dim}")
    if not 0 < eps_tilde <= 1:
        raise ConfigValidationError(f"sphere cover resolution must lie in (0, 1], got {eps_tilde}")
    if dim == 1:
        return SphereCover(1, eps_tilde, np.array([[1.0], [-1.0]]))

    n, count = cover_size_estimate(dim, eps_tilde)
    if count > settings.max_cover_size:
        raise ResourceError(
            f"sphere cover for d={dim}, resolution={eps_tilde:g} exceeds the size budget",
            estimate=count,
        )

    # integer lattice indices on each face of {0..n}^d, then deduplicate edges exactly
    ticks = np.arange(n + 1)
    face = np.stack(np.meshgrid(*([ticks] * (dim - 1)), indexing="ij"), axis=-1).reshape(-1, dim - 1)
    faces = []
    for axis in range(dim):
        for fixed in (0, n):
            block = np.insert(face, axis, fixed, axis=1)
            faces.append(block)
    lattice = np.unique(np.concatenate(faces), axis=0)

    points = -1.0 + 2.0 * lattice / n
    directions = points / np.linalg.norm(points, axis=1, keepdims=True)
    return SphereCover(dim, eps_tilde, directions)
