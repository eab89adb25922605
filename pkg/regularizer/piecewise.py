"""The piecewise-max regularizer g(x) = max_i piece_i(x)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from convex_sets.models import BodySpec
from regularizer.pieces import QuasiQuadraticPiece
from shared.errors import InputError

TIE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class PiecewiseRegularizer:
    pieces: tuple[QuasiQuadraticPiece, ...]
    alpha: float
    loss_body: BodySpec | None = None
    provenance: dict[str, Any] = field(default_factory=dict)
    value_bound: float | None = None

    # the cubic term bends each piece down away from its center; linearize inside the action set only
    globally_defined = False

    def __post_init__(self) -> None:
        pieces = tuple(self.pieces)
        if not pieces:
            raise InputError("a piecewise regularizer needs at least one piece")
        dims = {p.dim for p in pieces}
        cubics = {p.cubic_L for p in pieces}
        if len(dims) != 1:
            raise InputError(f"pieces disagree on dimension: {sorted(dims)}")
        if len(cubics) != 1:
            raise InputError(f"pieces disagree on cubic_L: {sorted(cubics)}")
        object.__setattr__(self, "pieces", pieces)
        # stacked copies for vectorized evaluation
        object.__setattr__(self, "_centers", np.stack([p.center for p in pieces]))
        object.__setattr__(self, "_values", np.array([p.value for p in pieces]))
        object.__setattr__(self, "_grads", np.stack([p.grad for p in pieces]))
        object.__setattr__(self, "_hessians", np.stack([p.hess for p in pieces]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PiecewiseRegularizer):
            return NotImplemented
        return (
            self.pieces == other.pieces
            and self.alpha == other.alpha
            and self.loss_body == other.loss_body
            and self.provenance == other.provenance
            and self.value_bound == other.value_bound
        )

    def __len__(self) -> int:
        return len(self.pieces)

    @property
    def dim(self) -> int:
        return self.pieces[0].dim

    @property
    def cubic_L(self) -> float:
        return self.pieces[0].cubic_L

    @property
    def centers(self) -> np.ndarray:
        return self._centers

    def _point(self, x: Any) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise InputError(f"point has shape {x.shape}, regularizer has dimension {self.dim}")
        return x

    def piece_values(self, x: Any) -> np.ndarray:
        deltas = self._point(x) - self._centers
        norms = np.linalg.norm(deltas, axis=1)
        quad = np.einsum("ni,nij,nj->n", deltas, self._hessians, deltas)
        return (
            self._values
            + np.einsum("ni,ni->n", self._grads, deltas)
            + 0.5 * quad
            - self.cubic_L / 6.0 * norms**3
        )

    def piece_values_many(self, xs: Any) -> np.ndarray:
        """(m, N) piece values at m points."""
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        if xs.shape[1] != self.dim:
            raise InputError(f"points have dimension {xs.shape[1]}, regularizer has dimension {self.dim}")
        deltas = xs[:, None, :] - self._centers[None, :, :]
        norms = np.linalg.norm(deltas, axis=2)
        quad = np.einsum("mni,nij,mnj->mn", deltas, self._hessians, deltas)
        linear = np.einsum("ni,mni->mn", self._grads, deltas)
        return self._values + linear + 0.5 * quad - self.cubic_L / 6.0 * norms**3

    def values_many(self, xs: Any) -> np.ndarray:
        return self.piece_values_many(xs).max(axis=1)

    def value(self, x: Any) -> float:
        return float(self.piece_values(x).max())

    def argmax_pieces(self, x: Any) -> list[int]:
        values = self.piece_values(x)
        return [int(i) for i in np.flatnonzero(values >= values.max() - TIE_TOLERANCE)]

    def subgradient(self, x: Any) -> np.ndarray:
        x = self._point(x)
        winner = self.argmax_pieces(x)[0]
        return self.pieces[winner].gradient(x)

    def value_range(self) -> float | None:
        return self.value_bound
