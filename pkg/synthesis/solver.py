"""Cutting-plane solve of the regularizer program.

Each round solves the LP relaxation over the static cuts plus every lazy
cut found so far, then asks the strong-convexity and PSD separators about
each center of the candidate. The loop ends when no center yields a cut.
"""
from __future__ import annotations

import time
from collections import Counter
from typing import Any

import numpy as np
from scipy import sparse
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from convex_sets.bodies import ConvexBody, require_symmetric
from convex_sets.cover import sphere_cover
from shared.config import settings
from shared.core import logger
from shared.errors import DoublingExhaustedError, InfeasibilityCertificate, ProgramInfeasibleError
from shared.lp import solve_lp
from shared.models import SolveStatus
from synthesis.calibration import calibrate_constants
from synthesis.cuts import StrongConvexitySeparator, locality_constraints, psd_cut, psd_upper_cut
from synthesis.grid import discretize_action_set
from synthesis.layout import InstanceLayout
from synthesis.metrics import SolverMetrics, solver_metrics_factory
from synthesis.models import (
    ConstraintCut,
    DiscretizationGrid,
    ProgramSolution,
    SolveReport,
    SynthesisConfig,
)


def cut_matrix(cuts: list[ConstraintCut], size: int) -> tuple[sparse.csr_matrix, np.ndarray]:
    if not cuts:
        return sparse.csr_matrix((0, size)), np.zeros(0)
    lengths = [len(c.indices) for c in cuts]
    rows = np.repeat(np.arange(len(cuts)), lengths)
    cols = np.fromiter((i for c in cuts for i in c.indices), dtype=np.int64, count=sum(lengths))
    vals = np.fromiter((v for c in cuts for v in c.coefficients), dtype=float, count=sum(lengths))
    matrix = sparse.coo_matrix((vals, (rows, cols)), shape=(len(cuts), size)).tocsr()
    return matrix, np.array([c.rhs for c in cuts])


def _certificate(config: SynthesisConfig, round_index: int, counts: Counter, reason: str) -> InfeasibilityCertificate:
    return InfeasibilityCertificate(
        c_guess=config.c_guess,
        round=round_index,
        cut_counts={family.value: n for family, n in counts.items()},
        reason=reason,
    )


def solve_program(
    action_set: ConvexBody,
    loss_set: ConvexBody,
    config: SynthesisConfig,
    *,
    grid: DiscretizationGrid | None = None,
    metrics: SolverMetrics | None = None,
) -> ProgramSolution:
    require_symmetric(action_set, "action set")
    require_symmetric(loss_set, "loss set")
    metrics = metrics or solver_metrics_factory()

    if config.infeasibility_precheck:
        metrics.infeasible.inc()
        raise ProgramInfeasibleError(
            "alpha exceeds c2/r^2",
            _certificate(config, 0, Counter(), f"precheck: alpha={config.alpha:g} > c2/r^2={config.c2 / config.r_inner**2:g}"),
        )

    grid = grid or discretize_action_set(action_set, config.eps_bar)
    layout = InstanceLayout(grid.count, grid.dim)
    static = locality_constraints(grid, config, layout)
    static_matrix, static_rhs = cut_matrix(static, layout.size)
    counts: Counter = Counter(c.family for c in static)

    cover = sphere_cover(grid.dim, config.eps_tilde)
    separator = StrongConvexitySeparator(loss_set, config.alpha, config.delta_m, config.delta_lin, cover)
    logger.info(
        f"Solving program: N={grid.count}, variables={layout.size}, static cuts={len(static)}, "
        f"cover directions={len(separator.directions)}"
    )

    objective = np.zeros(layout.size)
    objective[layout.r_index] = 1.0
    bounds = layout.bounds(config.c2)
    lazy: dict[tuple[Any, ...], ConstraintCut] = {}
    status = SolveStatus.MAX_ROUNDS
    lp_seconds = 0.0
    vector = None
    round_index = 0

    for round_index in range(1, config.max_rounds + 1):
        # canonical order keeps the LP, and so the result, independent of discovery order
        lazy_cuts = sorted(lazy.values(), key=lambda c: c.sort_key)
        lazy_matrix, lazy_rhs = cut_matrix(lazy_cuts, layout.size)
        matrix = sparse.vstack([static_matrix, lazy_matrix]).tocsr()
        rhs = np.concatenate([static_rhs, lazy_rhs])

        started = time.perf_counter()
        with metrics.lp_duration.time():
            solution = solve_lp(objective, matrix, rhs, bounds)
        lp_seconds += time.perf_counter() - started
        metrics.rounds.inc()

        if not solution.optimal:
            metrics.infeasible.inc()
            logger.warning(f"Relaxation infeasible at round {round_index} (C={config.c_guess:g})")
            raise ProgramInfeasibleError(
                "program infeasible",
                _certificate(config, round_index, counts, f"LP {solution.status.value}: {solution.message}"),
            )

        vector = solution.x
        instance = layout.unpack(vector)
        fresh: list[ConstraintCut] = []
        repeated = 0
        for i in range(grid.count):
            verdict = separator.separate(instance.hessians[i], config.cuts_per_center, config.cut_tolerance)
            for k in verdict.violated:
                cut = separator.to_cut(layout, i, k)
                if (cut.family, cut.tag) in lazy:
                    repeated += 1
                else:
                    fresh.append(cut)
            psd = psd_upper_cut(instance.hessians[i], config.c2, config.cut_tolerance)
            if not psd.ok:
                fresh.append(psd_cut(layout, i, psd, config.c2, round_index))

        logger.debug(f"Round {round_index}: objective={solution.objective:.6g}, new cuts={len(fresh)}")
        if not fresh:
            status = SolveStatus.CERTIFIED if repeated == 0 else SolveStatus.STALLED
            break
        for cut in fresh:
            lazy[(cut.family, cut.tag)] = cut
            counts[cut.family] += 1
            metrics.cuts.labels(family=cut.family.value).inc()

    instance = layout.unpack(vector)
    all_cuts = static + sorted(lazy.values(), key=lambda c: c.sort_key)
    matrix, rhs = cut_matrix(all_cuts, layout.size)
    max_violation = float(max(0.0, np.max(matrix @ vector - rhs)))
    sc_violation = max(separator.max_violation(h) for h in instance.hessians)
    psd_violation = max(float(np.linalg.eigvalsh(h)[-1]) - config.c2 for h in instance.hessians)
    metrics.max_violation.set(max_violation)

    report = SolveReport(
        status=status,
        objective=instance.r,
        n_centers=grid.count,
        rounds=round_index,
        cut_counts={family.value: n for family, n in sorted(counts.items(), key=lambda kv: kv[0].value)},
        max_violation=max_violation,
        max_strong_convexity_violation=max(0.0, sc_violation),
        max_psd_violation=max(0.0, psd_violation),
        lp_seconds=lp_seconds,
    )
    if report.certified:
        logger.success(f"✅ Program certified after {round_index} rounds, objective r={instance.r:.6g}")
    else:
        logger.warning(f"Program not certified ({status.value}) after {round_index} rounds")
    return ProgramSolution(instance=instance, grid=grid, config=config, report=report)


def solve_with_doubling(
    action_set: ConvexBody,
    loss_set: ConvexBody,
    overrides: dict[str, Any] | None,
    c_low: float,
    *,
    max_doublings: int | None = None,
    metrics: SolverMetrics | None = None,
) -> tuple[ProgramSolution, float]:
    """Double C from ``c_low`` until the program is feasible."""
    max_doublings = settings.max_doublings if max_doublings is None else max_doublings
    metrics = metrics or solver_metrics_factory()

    retrying = Retrying(
        stop=stop_after_attempt(max_doublings + 1),
        retry=retry_if_exception_type(ProgramInfeasibleError),
        before_sleep=lambda state: logger.warning(
            f"Infeasible at C={c_low * 2.0 ** (state.attempt_number - 1):g}, doubling"
        ),
    )
    try:
        for attempt in retrying:
            with attempt:
                c_guess = c_low * 2.0 ** (attempt.retry_state.attempt_number - 1)
                config = calibrate_constants(action_set, loss_set, c_guess, overrides)
                solution = solve_program(action_set, loss_set, config, metrics=metrics)
    except RetryError as e:
        last = e.last_attempt.exception()
        raise DoublingExhaustedError(
            f"no feasible program after {max_doublings} doublings from C={c_low:g}",
            last.certificate,
        ) from last

    logger.info(f"Feasible program found at C={c_guess:g}")
    return solution, c_guess
