"""Turning a solved instance into a regularizer, and re-checking it."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from convex_sets.bodies import ConvexBody
from convex_sets.cover import sphere_cover
from regularizer.piecewise import PiecewiseRegularizer
from regularizer.pieces import QuasiQuadraticPiece
from shared.core import logger
from shared.models import CutFamily
from synthesis.cuts import StrongConvexitySeparator, locality_constraints
from synthesis.grid import discretize_action_set
from synthesis.layout import InstanceLayout
from synthesis.models import DiscretizationGrid, ProgramInstance, SynthesisConfig, ValidationReport
from synthesis.solver import cut_matrix
from verify.convexity import strong_convexity_sampled
from verify.sampling import sample_in_body


def assemble_regularizer(
    instance: ProgramInstance,
    grid: DiscretizationGrid,
    config: SynthesisConfig,
    loss_set: ConvexBody | None = None,
    *,
    cubic_L: float | None = None,
    provenance: dict[str, Any] | None = None,
) -> PiecewiseRegularizer:
    """One piece per center, claimed alpha/2 strongly convex."""
    cubic_L = config.L if cubic_L is None else cubic_L
    pieces = tuple(
        QuasiQuadraticPiece(
            center=grid.centers[i],
            value=float(instance.values[i]),
            grad=instance.grads[i],
            hess=instance.hessians[i],
            cubic_L=cubic_L,
        )
        for i in range(grid.count)
    )
    provenance = {
        "config_digest": config.digest(),
        "c_guess": config.c_guess,
        "eps_bar": config.eps_bar,
        "n_centers": grid.count,
        "objective": instance.r,
        "locality_margin": config.locality_margin.value,
        **(provenance or {}),
    }
    return PiecewiseRegularizer(
        pieces=pieces,
        alpha=config.alpha / 2.0,
        loss_body=loss_set.spec if loss_set is not None else None,
        provenance=provenance,
        value_bound=config.C0,
    )


def quadratic_witness(grid: DiscretizationGrid, k: float) -> ProgramInstance:
    """Exact Taylor data of (k/2)|x|^2 at every center."""
    values = 0.5 * k * np.sum(grid.centers**2, axis=1)
    return ProgramInstance(
        r=float(values.max()),
        values=values,
        grads=k * grid.centers,
        hessians=np.tile(k * np.eye(grid.dim), (grid.count, 1, 1)),
    )


@dataclass
class LocalityAudit:
    samples: int
    failures: int
    max_distance: float
    radius: float

    @property
    def passed(self) -> bool:
        return self.failures == 0


def locality_audit(g: PiecewiseRegularizer, action_set: ConvexBody, radius: float, samples: int = 100, seed: int = 0) -> LocalityAudit:
    """Distance from sampled x to the center of the piece attaining g(x)."""
    points = sample_in_body(action_set, samples, np.random.default_rng(seed))
    distances = np.array([np.linalg.norm(g.centers[g.argmax_pieces(x)[0]] - x) for x in points])
    audit = LocalityAudit(
        samples=samples,
        failures=int(np.sum(distances > radius)),
        max_distance=float(distances.max()),
        radius=radius,
    )
    if audit.failures:
        logger.warning(
            f"Locality: {audit.failures}/{samples} samples pick a piece farther than {radius:.4g} "
            f"(max {audit.max_distance:.4g})"
        )
    return audit


def validate_instance(
    instance: ProgramInstance,
    action_set: ConvexBody,
    loss_set: ConvexBody,
    config: SynthesisConfig,
    grid: DiscretizationGrid | None = None,
    *,
    samples: int = 1_000,
    seed: int = 0,
    tolerance_factor: float = 2.0,
) -> ValidationReport:
    """Re-check every constraint family and sample the assembled regularizer.

    Strong convexity is checked on a cover twice as fine as the solver's, at
    the bare target alpha instead of the solver's alpha (1 + delta_m). A
    family passes when its worst violation is within ``tolerance_factor``
    times the cut tolerance.
    """
    grid = grid or discretize_action_set(action_set, config.eps_bar)
    layout = InstanceLayout(grid.count, grid.dim)
    vector = layout.pack(instance)
    static = locality_constraints(grid, config, layout)

    violations: dict[str, float] = {family.value: 0.0 for family in CutFamily}
    families = np.array([c.family.value for c in static])
    matrix, rhs = cut_matrix(static, layout.size)
    excess = matrix @ vector - rhs
    for family in set(families):
        violations[family] = max(0.0, float(excess[families == family].max()))

    eigen_tops = np.linalg.eigvalsh(instance.hessians)[:, -1]
    violations[CutFamily.PSD_UPPER.value] = max(0.0, float(eigen_tops.max() - config.c2))

    fine = sphere_cover(grid.dim, config.eps_tilde / 2.0)
    separator = StrongConvexitySeparator(
        loss_set, config.alpha, config.delta_m, config.delta_lin, fine, target_factor=config.alpha
    )
    violations[CutFamily.STRONG_CONVEXITY.value] = max(
        0.0, max(separator.max_violation(h) for h in instance.hessians)
    )

    g = assemble_regularizer(instance, grid, config, loss_set)
    rng = np.random.default_rng(seed)
    points = sample_in_body(action_set, max(samples, 1), rng)
    values = g.values_many(points)
    range_bound = config.C0 + config.eps * np.sqrt(config.dim) * config.c0

    report = ValidationReport(
        tolerance=config.cut_tolerance,
        family_violations=violations,
        g_min=float(values.min()),
        g_max=float(values.max()),
        range_bound=float(range_bound),
        value_bound=config.C0,
        tolerance_factor=tolerance_factor,
    )
    if samples > 0:
        convexity = strong_convexity_sampled(
            g, action_set, loss_set, g.alpha, samples, seed, tolerance=config.cut_tolerance, inner_fraction=0.5
        )
        report.sampled_min_slack = convexity.min_slack
        report.sampled_passed = convexity.passed
        audit = locality_audit(g, action_set, config.locality_radius, min(samples, 100), seed)
        report.locality_failures = audit.failures
        report.locality_max_distance = audit.max_distance
        report.locality_radius = audit.radius

    failing = [name for name, ok in report.family_passed.items() if not ok]
    if not report.range_within_c0:
        logger.warning(f"Sampled range of g is {report.value_range:.4g}, above C0={config.C0:.4g}")
    if failing:
        logger.warning(f"Validation failed for families: {', '.join(sorted(failing))}")
    else:
        logger.info(f"Validation passed: g in [{report.g_min:.4g}, {report.g_max:.4g}], bound {range_bound:.4g}")
    return report
