from __future__ import annotations

import math

import numpy as np
from scipy.spatial import cKDTree

from convex_sets.bodies import ConvexBody, require_symmetric
from shared.config import settings
from shared.core import logger
from shared.errors import ConfigValidationError, ResourceError
from synthesis.models import DiscretizationGrid
from verify.sampling import sample_in_body


def discretize_action_set(action_set: ConvexBody, eps_bar: float) -> DiscretizationGrid:
    """All lattice points k*eps_bar inside [-R, R]^d that lie in the action set."""
    require_symmetric(action_set, "action set")
    if eps_bar <= 0:
        raise ConfigValidationError(f"eps_bar must be positive, got {eps_bar}")

    d = action_set.dim
    R = action_set.radii.R_outer
    m = int(math.floor(R / eps_bar + 1e-12))
    candidates = float(2 * m + 1) ** d
    if candidates > settings.max_lattice_candidates:
        raise ResourceError(f"lattice for eps_bar={eps_bar:g} in d={d} is too large", estimate=candidates)

    ticks = np.arange(-m, m + 1) * eps_bar
    lattice = np.stack(np.meshgrid(*([ticks] * d), indexing="ij"), axis=-1).reshape(-1, d)
    centers = lattice[action_set.contains_many(lattice, settings.membership_tol)]
    if len(centers) > settings.max_grid_size:
        raise ResourceError(
            f"grid for eps_bar={eps_bar:g} exceeds max_grid_size={settings.max_grid_size}",
            estimate=len(centers),
        )

    logger.info(f"Discretized action set: {len(centers)} centers at spacing {eps_bar:g}")
    return DiscretizationGrid(centers=centers, spacing=eps_bar)


def coverage_radius(grid: DiscretizationGrid, action_set: ConvexBody, samples: int = 2_000, seed: int = 0) -> float:
    """Largest sampled distance from a point of the action set to its nearest center"""
    points = sample_in_body(action_set, samples, np.random.default_rng(seed))
    distances, _ = cKDTree(grid.centers).query(points)
    return float(distances.max())
