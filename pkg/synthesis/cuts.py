"""Constraint families of the program.

Static families (locality, gradient, value and objective-link bounds) are
emitted once. Strong-convexity and PSD-upper cuts are generated lazily by
separation at the current candidate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from convex_sets.bodies import ConvexBody
from convex_sets.cover import SphereCover
from shared.errors import NumericalError
from shared.models import CutFamily
from synthesis.layout import InstanceLayout, quadratic_basis, upper_triangle
from synthesis.models import ConstraintCut, DiscretizationGrid, SynthesisConfig


def _cut(indices, coefficients, rhs, family: CutFamily, tag: tuple[int, ...]) -> ConstraintCut:
    return ConstraintCut(
        indices=tuple(int(i) for i in indices),
        coefficients=tuple(float(c) for c in coefficients),
        rhs=float(rhs),
        family=family,
        tag=tag,
    )


def locality_constraints(
    grid: DiscretizationGrid,
    config: SynthesisConfig,
    layout: InstanceLayout | None = None,
) -> list[ConstraintCut]:
    layout = layout or InstanceLayout(grid.count, grid.dim)
    coefficient = config.locality_coefficient * config.L
    cuts: list[ConstraintCut] = []

    # pair cuts: r_i + <v_i, D> + D^T S_i D / 2 - r_j <= coef * L * |D|^3
    for i, center in enumerate(grid.centers):
        deltas = grid.centers - center
        basis = 0.5 * quadratic_basis(deltas)
        norms = np.linalg.norm(deltas, axis=1)
        v_idx = layout.grad_indices(i)
        s_idx = layout.sigma_indices(i)
        for j in range(grid.count):
            if j == i:
                continue
            cuts.append(
                _cut(
                    [layout.value_index(i), layout.value_index(j), *v_idx, *s_idx],
                    [1.0, -1.0, *deltas[j], *basis[j]],
                    coefficient * norms[j] ** 3,
                    CutFamily.LOCALITY,
                    (i, j),
                )
            )

    for i in range(grid.count):
        for k, index in enumerate(layout.grad_indices(i)):
            for sign in (1, -1):
                cuts.append(_cut([index], [sign], config.c0, CutFamily.GRAD_BOUND, (i, k, sign)))

    cuts.append(_cut([layout.r_index], [1.0], config.C0, CutFamily.VALUE_BOUND, (-1, 1)))
    for i in range(grid.count):
        index = layout.value_index(i)
        cuts.append(_cut([index], [1.0], config.C0, CutFamily.VALUE_BOUND, (i, 1)))
        # anchor: the objective is invariant to a common shift of all r_i
        cuts.append(_cut([index], [-1.0], 0.0, CutFamily.VALUE_BOUND, (i, -1)))
        cuts.append(_cut([index, layout.r_index], [1.0, -1.0], 0.0, CutFamily.OBJECTIVE_LINK, (i,)))
    return cuts


# ==================== Strong convexity ====================

@dataclass(frozen=True)
class StrongConvexityVerdict:
    certified: bool
    min_ratio: float
    violated: tuple[int, ...] = ()
    direction: np.ndarray | None = None
    dual_norm: float | None = None


class StrongConvexitySeparator:
    """Checks v^T S v >= alpha (1 + delta_m) |v|_*^2 over a half sphere cover.

    Dual norms of the cover directions depend only on the loss set, so they
    are computed once per solve.
    """

    def __init__(
        self,
        loss_set: ConvexBody,
        alpha: float,
        delta_m: float,
        delta_lin: float,
        cover: SphereCover,
        target_factor: float | None = None,
    ):
        half = cover.hemisphere()
        self.directions = half.directions
        self.dual_norms = loss_set.dual_gauge_many(self.directions)
        self.basis = quadratic_basis(self.directions)
        factor = alpha * (1.0 + delta_m) if target_factor is None else target_factor
        self.targets = factor * self.dual_norms**2
        self.delta_lin = delta_lin

    def ratios(self, sigma: np.ndarray) -> np.ndarray:
        forms = self.basis @ upper_triangle(sigma)
        return forms / self.dual_norms**2

    def separate(self, sigma: np.ndarray, top_k: int = 1, tolerance: float = 0.0) -> StrongConvexityVerdict:
        forms = self.basis @ upper_triangle(sigma)
        slack = forms - self.targets
        ratios = forms / self.dual_norms**2
        violated = np.flatnonzero(slack < -tolerance)
        if len(violated) == 0:
            return StrongConvexityVerdict(certified=True, min_ratio=float(ratios.min()))
        # most violated first by ratio, lowest index on ties
        order = violated[np.lexsort((violated, ratios[violated]))][:top_k]
        worst = int(order[0])
        return StrongConvexityVerdict(
            certified=False,
            min_ratio=float(ratios.min()),
            violated=tuple(int(k) for k in order),
            direction=self.directions[worst],
            dual_norm=float(self.dual_norms[worst]),
        )

    def max_violation(self, sigma: np.ndarray) -> float:
        return float(np.max(self.targets - self.basis @ upper_triangle(sigma)))

    def to_cut(self, layout: InstanceLayout, center: int, direction_index: int) -> ConstraintCut:
        # <v v^T, S_i> >= target, written as <= with negated coefficients
        return _cut(
            layout.sigma_indices(center),
            -self.basis[direction_index],
            -self.targets[direction_index],
            CutFamily.STRONG_CONVEXITY,
            (center, direction_index),
        )


def strong_convexity_cut(
    sigma: np.ndarray,
    loss_set: ConvexBody,
    alpha: float,
    delta_m: float,
    delta_lin: float,
    cover: SphereCover,
) -> StrongConvexityVerdict:
    separator = StrongConvexitySeparator(loss_set, alpha, delta_m, delta_lin, cover)
    return separator.separate(sigma)


# ==================== PSD upper bound ====================

@dataclass(frozen=True)
class PsdVerdict:
    ok: bool
    eigenvalue: float
    direction: np.ndarray


def psd_upper_cut(sigma: np.ndarray, c2: float, tolerance: float = 0.0) -> PsdVerdict:
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(sigma)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"eigendecomposition failed: {e}") from e
    top = float(eigenvalues[-1])
    return PsdVerdict(ok=top <= c2 + tolerance, eigenvalue=top, direction=eigenvectors[:, -1])


def psd_cut(layout: InstanceLayout, center: int, verdict: PsdVerdict, c2: float, round_index: int) -> ConstraintCut:
    return _cut(
        layout.sigma_indices(center),
        quadratic_basis(verdict.direction)[0],
        c2,
        CutFamily.PSD_UPPER,
        (center, round_index),
    )
