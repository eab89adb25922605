"""Loss sequences for the benchmark suite.

Every kind draws from a finite list of loss-set extremes (or a caller-given
direction list), so each emitted loss is in the loss set by construction.
"""
from __future__ import annotations

import numpy as np

from convex_sets.bodies import ConvexBody
from shared.config import settings
from shared.errors import ConfigValidationError
from shared.models import AdversaryKind


class Adversary:
    def __init__(
        self,
        kind: AdversaryKind | str,
        loss_set: ConvexBody,
        seed: int = 0,
        directions: np.ndarray | None = None,
    ):
        self.kind = AdversaryKind(kind)
        self.loss_set = loss_set
        self.seed = seed
        extremes = loss_set.extreme_points() if directions is None else np.atleast_2d(np.asarray(directions, dtype=float))
        if extremes.shape[1] != loss_set.dim:
            raise ConfigValidationError(
                f"adversary directions have dimension {extremes.shape[1]}, loss set {loss_set.dim}"
            )
        outside = ~loss_set.contains_many(extremes, settings.membership_tol)
        if outside.any():
            raise ConfigValidationError(f"{int(outside.sum())} adversary directions lie outside the loss set")
        self.extremes = extremes
        self._trap = self._trap_pair()
        self.reset()

    def __repr__(self) -> str:
        return f"Adversary({self.kind.value}, seed={self.seed}, extremes={len(self.extremes)})"

    @property
    def adaptive(self) -> bool:
        return self.kind is AdversaryKind.SIGN_ADAPTIVE

    def reset(self) -> None:
        self._rng = np.random.default_rng(self.seed)

    def _trap_pair(self) -> tuple[np.ndarray, np.ndarray]:
        # u and the extreme farthest from it; on symmetric sets that is -u
        u = self.extremes[0]
        w = self.extremes[int(np.argmax(np.linalg.norm(self.extremes - u, axis=1)))]
        return 0.5 * (u + w), 0.5 * (u - w)

    def next_loss(self, t: int, x: np.ndarray) -> np.ndarray:
        if self.kind is AdversaryKind.ZERO:
            return np.zeros(self.loss_set.dim)
        if self.kind is AdversaryKind.IID_EXTREME:
            return self.extremes[self._rng.integers(len(self.extremes))].copy()
        if self.kind is AdversaryKind.SIGN_ADAPTIVE:
            # np.argmax takes the lowest index on ties
            return self.extremes[int(np.argmax(self.extremes @ x))].copy()
        if self.kind is AdversaryKind.FOLLOW_LEADER_TRAP:
            middle, half = self._trap
            if t == 0:
                return middle + 0.5 * half
            return middle + half if t % 2 == 0 else middle - half
        raise ConfigValidationError(f"unknown adversary kind {self.kind}")
