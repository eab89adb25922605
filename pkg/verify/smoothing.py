"""Monte Carlo Gaussian smoothing and its convexity check.

Every estimate of one SmoothedFunction uses the same noise draws, so value
and subgradient estimates are consistent with each other and the sampled
first-order slack of the smoothed function is exactly the mean of the
per-draw slacks of the base function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, NonNegativeInt, PositiveFloat, PositiveInt

from convex_sets.bodies import ConvexBody, euclidean_ball
from shared.core import logger
from verify.convexity import ConvexityReport, strong_convexity_sampled
from verify.sampling import sample_in_body

# a sampled slack passes when it is within this many standard errors of zero
STDERR_MULTIPLIER = 3.0


class SmoothingProbe(BaseModel):
    model_config = ConfigDict(frozen=True)

    sigma: PositiveFloat
    n: PositiveInt = 256
    seed: NonNegativeInt = 0

    def draws(self, dim: int) -> np.ndarray:
        return np.random.default_rng(self.seed).standard_normal((self.n, dim))


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float

    @classmethod
    def of(cls, samples: np.ndarray) -> "McEstimate":
        n = len(samples)
        stderr = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else math.inf
        return cls(mean=float(np.mean(samples)), stderr=stderr)


def smoothed_derivative_bounds(C: float, r: float, d: int, sigma: float | None = None) -> dict[str, float]:
    """Bounds on the Gaussian smoothing of a C^2/r^2-quadratically bounded function."""
    sigma = r / d**0.25 if sigma is None else sigma
    K = math.sqrt(8.0 * (1.0 + 4.0 * d * sigma**4 / r**4))
    C2 = C**2
    return {
        "value": C2 * (sigma**2 * d / r**2 + 1.0),
        "gradient": C2 * K / sigma,
        "hessian": 4.0 * C2 * K / sigma**2,
        "third": 5.0 * C2 * K / sigma**3,
    }


class SmoothedFunction:
    """f(x) = E f0(x + sigma z), z ~ N(0, I), by a fixed sample of z."""

    globally_defined = True

    def __init__(self, base: Any, probe: SmoothingProbe):
        self.base = base
        self.probe = probe
        self.dim = base.dim
        self.noise = probe.sigma * probe.draws(self.dim)

    def value_draws(self, x: np.ndarray) -> np.ndarray:
        return np.array([self.base.value(x + z) for z in self.noise])

    def subgradient_draws(self, x: np.ndarray) -> np.ndarray:
        return np.array([self.base.subgradient(x + z) for z in self.noise])

    def value(self, x: np.ndarray) -> float:
        return float(self.value_draws(np.asarray(x, dtype=float)).mean())

    def subgradient(self, x: np.ndarray) -> np.ndarray:
        return self.subgradient_draws(np.asarray(x, dtype=float)).mean(axis=0)

    def stein_gradient(self, x: np.ndarray) -> np.ndarray:
        """Zeroth-order estimate E[(f0(x + sigma z) - f0(x)) z] / sigma."""
        x = np.asarray(x, dtype=float)
        z = self.noise / self.probe.sigma
        shifts = self.value_draws(x) - self.base.value(x)
        return (shifts[:, None] * z).mean(axis=0) / self.probe.sigma


def gaussian_smooth_mc(base: Any, probe: SmoothingProbe, x: Any) -> McEstimate:
    smoothed = SmoothedFunction(base, probe)
    return McEstimate.of(smoothed.value_draws(np.asarray(x, dtype=float)))


@dataclass
class SmoothingReport:
    probe: SmoothingProbe
    convexity: ConvexityReport
    first_order_stderr: float
    second_order_stderr: float
    worst_points: np.ndarray

    @property
    def min_slack(self) -> float:
        return self.convexity.min_slack

    @property
    def passed(self) -> bool:
        c = self.convexity
        first_ok = c.first_order_min_slack >= -(STDERR_MULTIPLIER * self.first_order_stderr + c.tolerance)
        second_ok = c.second_order_min_slack >= -(STDERR_MULTIPLIER * self.second_order_stderr + c.tolerance)
        return first_ok and second_ok


def _worst_midpoints(smoothed: SmoothedFunction, loss_set: ConvexBody, alpha: float, action_set: ConvexBody, n: int, seed: int, count: int = 5) -> np.ndarray:
    rng = np.random.default_rng(seed + 1)
    xs = sample_in_body(action_set, n, rng)
    ys = sample_in_body(action_set, n, rng)
    dual = loss_set.dual_gauge_many(ys - xs)
    slacks = np.array(
        [smoothed.value(y) - smoothed.value(x) - smoothed.subgradient(x) @ (y - x) - 0.5 * alpha * dn**2 for x, y, dn in zip(xs, ys, dual)]
    )
    order = np.argsort(slacks)[:count]
    return 0.5 * (xs[order] + ys[order])


def smoothing_preserves_convexity_check(
    base: Any,
    probe: SmoothingProbe,
    loss_set: ConvexBody,
    alpha: float,
    n: int = 200,
    *,
    action_set: ConvexBody | None = None,
    tolerance: float = 1e-9,
    step: float = 1e-3,
) -> SmoothingReport:
    """Sample the strong-convexity inequalities of the smoothed base function.

    Passes when every sampled slack is above minus three standard errors of
    its own estimate.
    """
    action_set = action_set or euclidean_ball(base.dim, 1.0)
    smoothed = SmoothedFunction(base, probe)
    report = strong_convexity_sampled(
        smoothed, action_set, loss_set, alpha, n, probe.seed, tolerance=tolerance, step=step
    )

    x, y = report.worst_pair
    dual = loss_set.dual_gauge(y - x)
    first = (
        smoothed.value_draws(y)
        - smoothed.value_draws(x)
        - smoothed.subgradient_draws(x) @ (y - x)
        - 0.5 * alpha * dual**2
    )
    point, direction = report.worst_direction
    dual_v = loss_set.dual_gauge(direction)
    second = (
        smoothed.value_draws(point + step * direction)
        - 2.0 * smoothed.value_draws(point)
        + smoothed.value_draws(point - step * direction)
    ) / step**2 - alpha * dual_v**2

    result = SmoothingReport(
        probe=probe,
        convexity=report,
        first_order_stderr=McEstimate.of(first).stderr,
        second_order_stderr=McEstimate.of(second).stderr,
        worst_points=_worst_midpoints(smoothed, loss_set, alpha, action_set, min(n, 50), probe.seed),
    )
    if not result.passed:
        logger.warning(
            f"Smoothed function fails strong convexity at sigma={probe.sigma:g}: min slack {result.min_slack:.3g}"
        )
    return result
