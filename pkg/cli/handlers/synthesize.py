from __future__ import annotations

from typing import Any

from cli.config import SynthesizeBlock
from cli.report import write_report
from convex_sets.bodies import build_body
from regularizer.serialization import serialize
from shared.config import settings
from shared.core import logger
from shared.errors import ProgramInfeasibleError
from shared.models import ExitCode
from synthesis import (
    assemble_regularizer,
    calibrate_constants,
    solve_program,
    solve_with_doubling,
    solver_metrics_factory,
    validate_instance,
)
from synthesis.models import ProgramSolution

_CONSTANTS = ("dim", "eps_bar", "eps", "L", "alpha", "c0", "c2", "C0", "delta_m", "delta_lin", "eps_tilde", "r_inner", "R_outer")


def _solution_items(solution: ProgramSolution) -> dict[str, Any]:
    report, config = solution.report, solution.config
    items: dict[str, Any] = {
        "status": report.status.value,
        "certified": report.certified,
        "objective": report.objective,
        "n_centers": report.n_centers,
        "rounds": report.rounds,
        "c_final": config.c_guess,
        "locality_margin": config.locality_margin.value,
    }
    items.update({f"cuts_{family}": n for family, n in report.cut_counts.items()})
    items.update(
        max_violation=report.max_violation,
        max_strong_convexity_violation=report.max_strong_convexity_violation,
        max_psd_violation=report.max_psd_violation,
    )
    items.update({name: getattr(config, name) for name in _CONSTANTS})
    items.update({f"theory_{name}": value for name, value in sorted(config.theory.items())})
    if settings.report_timings:
        items["lp_seconds"] = report.lp_seconds
    return items


def handle(block: SynthesizeBlock, digest: str) -> ExitCode:
    action_set = build_body(block.action_set)
    loss_set = build_body(block.loss_set)
    metrics = solver_metrics_factory()
    c_guess = block.c_guess or settings.default_c_guess

    try:
        if block.doubling:
            solution, _ = solve_with_doubling(
                action_set, loss_set, block.overrides(), c_guess, max_doublings=block.max_doublings, metrics=metrics
            )
        else:
            config = calibrate_constants(action_set, loss_set, c_guess, block.overrides())
            solution = solve_program(action_set, loss_set, config, metrics=metrics)
    except ProgramInfeasibleError as e:
        logger.warning(f"Program infeasible: {e.certificate.describe()}")
        write_report(
            block.report,
            {"config_digest": digest, "status": "infeasible", "certificate": e.certificate.describe(), "error": str(e)},
        )
        if block.metrics_out:
            metrics.write(block.metrics_out)
        return ExitCode.INFEASIBLE

    g = assemble_regularizer(
        solution.instance, solution.grid, solution.config, loss_set, provenance={"run_config_digest": digest}
    )
    block.out.parent.mkdir(parents=True, exist_ok=True)
    block.out.write_bytes(serialize(g))
    logger.info(f"Regularizer with {len(g)} pieces written to {block.out}")

    items = {"config_digest": digest, **_solution_items(solution)}
    if block.validate_output:
        validation = validate_instance(
            solution.instance, action_set, loss_set, solution.config, solution.grid, samples=block.samples, seed=block.seed
        )
        items.update({f"validation_{family}": v for family, v in sorted(validation.family_violations.items())})
        items.update(
            validation_passed=validation.passed,
            g_min=validation.g_min,
            g_max=validation.g_max,
            range_bound=validation.range_bound,
            value_range=validation.value_range,
            range_within_c0=validation.range_within_c0,
            sampled_min_slack=validation.sampled_min_slack,
            locality_failures=validation.locality_failures,
            locality_max_distance=validation.locality_max_distance,
            locality_radius=validation.locality_radius,
        )
    write_report(block.report, items)
    if block.metrics_out:
        metrics.write(block.metrics_out)
    return ExitCode.OK
