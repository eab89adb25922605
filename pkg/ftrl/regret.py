"""Running regret of a played sequence against the best fixed action in hindsight."""
from __future__ import annotations

import numpy as np

from convex_sets.bodies import ConvexBody


def cumulative_regret(actions: np.ndarray, losses: np.ndarray, action_set: ConvexBody) -> np.ndarray:
    """Prefix learner loss minus min over x of <x, prefix cumulative loss>."""
    learner = np.cumsum(np.einsum("ti,ti->t", actions, losses))
    prefix = np.cumsum(losses, axis=0)
    # min_x <x, S> = -h(-S)
    comparator = -action_set.support_many(-prefix)
    return learner - comparator
