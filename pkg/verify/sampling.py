from __future__ import annotations

import numpy as np

from convex_sets.bodies import ConvexBody
from shared.errors import ResourceError
from shared.models import BodyKind

MAX_DRAW_FACTOR = 500


def sample_in_body(body: ConvexBody, n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """n points drawn uniformly from ``scale * body`` by rejection from the bounding box.

    The simplex has no volume in R^d and is sampled from a flat Dirichlet instead.
    """
    if body.kind is BodyKind.SIMPLEX:
        return rng.dirichlet(np.ones(body.dim), size=n)

    lower, upper = body.bounding_box()
    accepted: list[np.ndarray] = []
    total, drawn = 0, 0
    batch = max(64, 2 * n)
    while total < n:
        if drawn > MAX_DRAW_FACTOR * n:
            raise ResourceError(
                f"rejection sampling starved in {body.kind.value} (accepted {total} of {drawn} draws)",
                estimate=drawn / max(total, 1),
            )
        candidates = rng.uniform(lower, upper, size=(batch, body.dim))
        drawn += batch
        keep = candidates[body.contains_many(candidates, 0.0)]
        accepted.append(keep)
        total += len(keep)
    center = body.interior_point()
    points = np.concatenate(accepted)[:n]
    return center + scale * (points - center)


def sample_directions(dim: int, n: int, rng: np.random.Generator) -> np.ndarray:
    directions = rng.standard_normal((n, dim))
    return directions / np.linalg.norm(directions, axis=1, keepdims=True)
