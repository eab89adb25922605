"""Sampled strong-convexity checks against a dual (loss-set) norm."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from convex_sets.bodies import ConvexBody
from regularizer.views import RegularizerView
from verify.sampling import sample_directions, sample_in_body


@dataclass
class ConvexityReport:
    alpha: float
    samples: int
    tolerance: float
    first_order_min_slack: float
    second_order_min_slack: float
    worst_pair: tuple[np.ndarray, np.ndarray]
    worst_direction: tuple[np.ndarray, np.ndarray]

    @property
    def min_slack(self) -> float:
        return min(self.first_order_min_slack, self.second_order_min_slack)

    @property
    def passed(self) -> bool:
        return self.min_slack >= -self.tolerance


def first_order_slacks(view: RegularizerView, loss_set: ConvexBody, alpha: float, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """f(y) - f(x) - <g_x, y - x> - (alpha/2) |y - x|_*^2 per pair"""
    dual = loss_set.dual_gauge_many(ys - xs)
    return np.array(
        [
            view.value(y) - view.value(x) - view.subgradient(x) @ (y - x) - 0.5 * alpha * d**2
            for x, y, d in zip(xs, ys, dual)
        ]
    )


def second_order_slacks(view: RegularizerView, loss_set: ConvexBody, alpha: float, xs: np.ndarray, vs: np.ndarray, step: float) -> np.ndarray:
    """second differences along v minus alpha |v|_*^2"""
    dual = loss_set.dual_gauge_many(vs)
    return np.array(
        [
            (view.value(x + step * v) - 2.0 * view.value(x) + view.value(x - step * v)) / step**2 - alpha * d**2
            for x, v, d in zip(xs, vs, dual)
        ]
    )


def strong_convexity_sampled(
    view: RegularizerView,
    action_set: ConvexBody,
    loss_set: ConvexBody,
    alpha: float,
    n: int = 1_000,
    seed: int = 0,
    *,
    tolerance: float = 1e-6,
    step: float = 1e-3,
    inner_fraction: float = 1.0,
) -> ConvexityReport:
    rng = np.random.default_rng(seed)
    xs = sample_in_body(action_set, n, rng, scale=inner_fraction)
    ys = sample_in_body(action_set, n, rng, scale=inner_fraction)
    first = first_order_slacks(view, loss_set, alpha, xs, ys)

    points = sample_in_body(action_set, n, rng, scale=inner_fraction)
    directions = sample_directions(action_set.dim, n, rng)
    second = second_order_slacks(view, loss_set, alpha, points, directions, step)

    i, j = int(np.argmin(first)), int(np.argmin(second))
    return ConvexityReport(
        alpha=alpha,
        samples=n,
        tolerance=tolerance,
        first_order_min_slack=float(first[i]),
        second_order_min_slack=float(second[j]),
        worst_pair=(xs[i], ys[i]),
        worst_direction=(points[j], directions[j]),
    )
