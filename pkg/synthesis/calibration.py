"""Constant schedule for the program.

The asymptotic bounds on the smoothed regularizer are taken with unit
constants: c1~ = C^2 d^(1/4)/r, c2~ = C^2 d^(1/2)/r^2, L = C^2 d^(3/4)/r^3.
Grid corrections add L*eps_bar^3 to c0, c2 and C0. User overrides win; the
margin invariants are then checked by SynthesisConfig itself.
"""
from __future__ import annotations

import math
from typing import Any

from pydantic import ValidationError

from convex_sets.bodies import ConvexBody, require_symmetric
from shared.config import settings
from shared.errors import ConfigValidationError
from synthesis.models import SynthesisConfig
from verify.smoothing import smoothed_derivative_bounds

# keys accepted in ``overrides`` besides the SynthesisConfig fields
_EXTRA_OVERRIDES = {"margin"}


def common_radii(action_set: ConvexBody, loss_set: ConvexBody) -> tuple[float, float]:
    """r and R valid for both sets at once"""
    a, b = action_set.radii, loss_set.radii
    return min(a.r_inner, b.r_inner), max(a.R_outer, b.R_outer)


def theory_schedule(d: int, r: float, R: float, C: float, alpha: float, L: float, c0: float, c2: float, eps: float, n_centers: int | None = None, C0: float | None = None) -> dict[str, float]:
    """Constants the existence argument would use, kept as report metadata"""
    sigma = r / d**0.25
    smooth = smoothed_derivative_bounds(C, r, d, sigma)
    c1 = math.sqrt(d) * c0
    schedule = {
        "eps_bar_theory": r**6 / (R**6 * C**6 * d**2 * math.sqrt(d)),
        "eps_theory": r**6 / (R**6 * C**6 * d**2),
        "eps1_theory": C**2 / 2.0,
        "smoothing_sigma": sigma,
        "smoothed_value_bound": smooth["value"],
        "smoothed_gradient_bound": smooth["gradient"],
        "smoothed_hessian_bound": smooth["hessian"],
        "smoothed_third_bound": smooth["third"],
        "locality_radius": 4.0 * (eps * c1 / L) ** (1.0 / 3.0),
        "locality_eps_bound": min(L / c1, L / (c1 * c2**3), L / c2, math.sqrt(c1), c1 / c2),
        "strong_convexity_eps_bound": alpha**3 / (512.0 * R**6 * L**2 * c1),
    }
    if n_centers is not None and C0 is not None:
        schedule["feasible_ball_inner_radius"] = L * (eps / math.sqrt(d)) ** 3 / 288.0
        schedule["feasible_ball_outer_radius"] = 2.0 * math.sqrt(
            (n_centers + 1) * C0**2 + n_centers * d * (c0**2 + c2**2)
        )
    return schedule


def calibrate_constants(
    action_set: ConvexBody,
    loss_set: ConvexBody,
    c_guess: float,
    overrides: dict[str, Any] | None = None,
) -> SynthesisConfig:
    require_symmetric(action_set, "action set")
    require_symmetric(loss_set, "loss set")
    if c_guess <= 0:
        raise ConfigValidationError(f"C_guess must be positive, got {c_guess}")
    if action_set.dim != loss_set.dim:
        raise ConfigValidationError(f"action set is {action_set.dim}-dimensional, loss set {loss_set.dim}")

    overrides = dict(overrides or {})
    unknown = set(overrides) - set(SynthesisConfig.model_fields) - _EXTRA_OVERRIDES
    if unknown:
        raise ConfigValidationError([f"unknown override: {name}" for name in sorted(unknown)])

    d = action_set.dim
    r, R = common_radii(action_set, loss_set)
    C2 = c_guess**2

    eps_bar = overrides.pop("eps_bar", settings.default_eps_bar)
    alpha = overrides.pop("alpha", settings.default_alpha)
    margin = overrides.pop("margin", settings.default_margin)
    L = overrides.pop("L", C2 * d**0.75 / r**3)
    correction = L * eps_bar**3
    c0 = overrides.pop("c0", C2 * d**0.25 / r + correction)
    c2 = overrides.pop("c2", C2 * math.sqrt(d) / r**2 + correction)
    C0 = overrides.pop("C0", C2 + correction)
    delta_m = overrides.pop("delta_m", margin / (2.0 * alpha * R**2))
    delta_lin = overrides.pop("delta_lin", delta_m * min(1.0, r) / 4.0)
    eps_tilde = overrides.pop("eps_tilde", min(0.5, alpha * r**3 * delta_m / (c2 * R)))
    eps = overrides.pop("eps", math.sqrt(d) * eps_bar)

    fields = {
        "dim": d,
        "eps_bar": eps_bar,
        "eps": eps,
        "L": L,
        "alpha": alpha,
        "c0": c0,
        "c2": c2,
        "C0": C0,
        "delta_m": delta_m,
        "delta_lin": delta_lin,
        "eps_tilde": eps_tilde,
        "r_inner": r,
        "R_outer": R,
        "c_guess": c_guess,
        "cut_tolerance": settings.cut_tolerance,
        "max_rounds": settings.max_cut_rounds,
        "cuts_per_center": settings.cuts_per_center,
        "theory": theory_schedule(d, r, R, c_guess, alpha, L, c0, c2, eps),
    }
    fields.update(overrides)
    try:
        return SynthesisConfig(**fields)
    except ValidationError as e:
        raise ConfigValidationError(
            [f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()]
        ) from e
