from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from convex_sets.bodies import ConvexBody
from regularizer.views import RegularizerView
from shared.errors import InputError
from verify.sampling import sample_directions, sample_in_body


def finite_diff(view: RegularizerView, x: np.ndarray, order: int = 1, h: float = 1e-4) -> np.ndarray:
    """Central differences of the value: gradient for order 1, Hessian for order 2."""
    if h <= 0:
        raise InputError(f"step must be positive, got {h}")
    x = np.asarray(x, dtype=float)
    d = len(x)
    basis = np.eye(d) * h
    if order == 1:
        return np.array([(view.value(x + e) - view.value(x - e)) / (2 * h) for e in basis])
    if order == 2:
        hessian = np.empty((d, d))
        for k in range(d):
            for l in range(k, d):
                ek, el = basis[k], basis[l]
                hessian[k, l] = hessian[l, k] = (
                    view.value(x + ek + el) - view.value(x + ek - el) - view.value(x - ek + el) + view.value(x - ek - el)
                ) / (4 * h * h)
        return hessian
    raise InputError(f"finite_diff supports order 1 or 2, got {order}")


@dataclass(frozen=True)
class DerivativeBounds:
    gradient: float
    hessian: float
    third: float


@dataclass
class DerivativeAuditReport:
    samples: int
    max_gradient: float
    max_hessian: float
    max_hessian_lipschitz: float
    bounds: DerivativeBounds | None = None

    @property
    def within(self) -> dict[str, bool]:
        if self.bounds is None:
            return {}
        return {
            "gradient": self.max_gradient <= self.bounds.gradient,
            "hessian": self.max_hessian <= self.bounds.hessian,
            "third": self.max_hessian_lipschitz <= self.bounds.third,
        }

    @property
    def passed(self) -> bool:
        return all(self.within.values())


def derivative_bound_audit(
    view: RegularizerView,
    action_set: ConvexBody,
    bounds: DerivativeBounds | None = None,
    n: int = 200,
    seed: int = 0,
    h: float = 1e-4,
) -> DerivativeAuditReport:
    """Largest sampled |<grad, v>|, |H|_op and |H(x) - H(y)|_op / |x - y|."""
    rng = np.random.default_rng(seed)
    points = sample_in_body(action_set, n, rng)
    directions = sample_directions(action_set.dim, n, rng)

    gradients = np.array([view.subgradient(x) for x in points])
    max_gradient = float(np.max(np.abs(np.einsum("ij,ij->i", gradients, directions))))

    hessians = np.array([finite_diff(view, x, order=2, h=h) for x in points])
    max_hessian = float(np.max(np.linalg.norm(hessians, ord=2, axis=(1, 2))))

    gaps = np.linalg.norm(np.diff(points, axis=0), axis=1)
    changes = np.linalg.norm(np.diff(hessians, axis=0), ord=2, axis=(1, 2))
    valid = gaps > 1e-9
    max_lipschitz = float(np.max(changes[valid] / gaps[valid])) if valid.any() else 0.0

    return DerivativeAuditReport(
        samples=n,
        max_gradient=max_gradient,
        max_hessian=max_hessian,
        max_hessian_lipschitz=max_lipschitz,
        bounds=bounds,
    )
