"""Kelley cutting-plane minimization of weight*g(x) + <c, x> over an oracle body.

The LP lives in (x, tau): tau is bounded below by linearizations of g and x
by halfspaces of the action set (exact when the body is polyhedral, otherwise
collected from its separation oracle). An infeasible LP point is projected,
or pulled back toward the interior point when the body has no closed-form
projection, and g is linearized there; the infeasible point itself gets a
cut of g only when the view is globally defined. Neither kind of cut depends
on the linear term or the weight, so one minimizer keeps its cache across
FTRL rounds.
"""
from __future__ import annotations

from collections import deque
from typing import Any

import numpy as np

from convex_sets.bodies import ConvexBody
from ftrl.models import InnerSolveConfig, InnerSolveResult
from regularizer.views import RegularizerView
from shared.config import settings
from shared.core import logger
from shared.errors import InputError, NumericalError
from shared.lp import solve_lp

PULL_STEPS = 50


class KelleyMinimizer:
    def __init__(self, view: RegularizerView, action_set: ConvexBody, cfg: InnerSolveConfig | None = None):
        if view.dim != action_set.dim:
            raise InputError(f"regularizer has dimension {view.dim}, action set {action_set.dim}")
        self.view = view
        self._globally_defined = getattr(view, "globally_defined", True)
        self.action_set = action_set
        self.cfg = cfg or InnerSolveConfig()
        self.dim = action_set.dim
        self.lower, self.upper = action_set.bounding_box()

        # tau >= g(p) + <s, x - p>  stored as (s, <s, p> - g(p))
        self._g_cuts: deque[tuple[np.ndarray, float]] = deque(maxlen=self.cfg.cache_size)
        exact = action_set.halfspaces()
        self._exact_set = exact is not None
        self._set_normals: list[np.ndarray] = list(exact[0]) if exact else []
        self._set_offsets: list[float] = list(exact[1]) if exact else []
        self._add_g_cut(action_set.interior_point())

    @property
    def cache_size(self) -> int:
        return len(self._g_cuts) + len(self._set_normals)

    def _add_g_cut(self, point: np.ndarray) -> float:
        value = float(self.view.value(point))
        slope = np.asarray(self.view.subgradient(point), dtype=float)
        self._g_cuts.append((slope, float(slope @ point) - value))
        return value

    def _add_set_cut(self, point: np.ndarray) -> None:
        separation = self.action_set.separation(point, settings.membership_tol)
        if separation.inside:
            return
        # <c, x> >= min over the body of <c, x>, as -c.x <= h(-c)
        c = separation.normal
        self._set_normals.append(-c)
        self._set_offsets.append(self.action_set.support(-c))

    def _model(self, weight: float, linear: np.ndarray) -> tuple[np.ndarray, float]:
        d = self.dim
        rows, rhs = [], []
        for slope, offset in self._g_cuts:
            rows.append(np.append(slope, -1.0))
            rhs.append(offset)
        for normal, offset in zip(self._set_normals, self._set_offsets):
            rows.append(np.append(normal, 0.0))
            rhs.append(offset)
        objective = np.append(linear, weight)
        bounds = [(float(lo), float(hi)) for lo, hi in zip(self.lower, self.upper)] + [(None, None)]
        solution = solve_lp(objective, np.array(rows), np.array(rhs), bounds)
        if not solution.optimal:
            raise NumericalError(f"inner cut model is {solution.status.value}: {solution.message}")
        return solution.x[:d], float(solution.objective)

    def _objective(self, weight: float, linear: np.ndarray, x: np.ndarray) -> float:
        return weight * float(self.view.value(x)) + float(linear @ x)

    def _feasible(self, x: np.ndarray) -> bool:
        return self.action_set.membership(x, settings.membership_tol)

    def _pull_inside(self, x: np.ndarray) -> np.ndarray:
        """Last feasible point on the segment from the interior point to x, by bisection."""
        center = self.action_set.interior_point()
        lo, hi = 0.0, 1.0
        for _ in range(PULL_STEPS):
            mid = 0.5 * (lo + hi)
            if self._feasible(center + mid * (x - center)):
                lo = mid
            else:
                hi = mid
        return center + lo * (x - center)

    def minimize(self, weight: float, linear: Any, scale: float = 1.0) -> InnerSolveResult:
        """Stop once value - model bound <= cfg.tol * scale."""
        linear = np.asarray(linear, dtype=float)
        target = self.cfg.tol * max(scale, 1e-12)

        best_x = self.action_set.interior_point()
        best_value = self._objective(weight, linear, best_x)
        bound = -np.inf

        for iteration in range(1, self.cfg.max_iter + 1):
            x, model_value = self._model(weight, linear)
            bound = max(bound, model_value)

            if self._exact_set:
                # LP tolerance may leave x a hair outside; a closed-form projection cleans it up
                projected = self.action_set.project(x)
                candidates = [x if projected is None else projected]
            elif self._feasible(x):
                candidates = [x]
            else:
                self._add_set_cut(x)
                if self._globally_defined:
                    self._add_g_cut(x)
                projected = self.action_set.project(x)
                candidates = [projected if projected is not None else self._pull_inside(x)]

            for point in candidates:
                value = weight * self._add_g_cut(point) + float(linear @ point)
                if value < best_value:
                    best_x, best_value = point, value

            if best_value - bound <= target:
                return InnerSolveResult(best_x, best_value, bound, iteration, certified=True)

        logger.warning(
            f"Inner solve stopped at max_iter={self.cfg.max_iter} with gap {best_value - bound:.3g} "
            f"(target {target:.3g})"
        )
        return InnerSolveResult(best_x, best_value, bound, self.cfg.max_iter, certified=False)


def inner_minimize(objective: RegularizerView, action_set: ConvexBody, tol: float = 1e-6, *, max_iter: int = 500) -> InnerSolveResult:
    """Minimize a convex value/subgradient view over the action set to absolute gap ``tol``."""
    cfg = InnerSolveConfig(tol=tol, max_iter=max_iter, closed_form=False)
    minimizer = KelleyMinimizer(objective, action_set, cfg)
    return minimizer.minimize(1.0, np.zeros(action_set.dim))
