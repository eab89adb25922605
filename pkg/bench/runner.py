from __future__ import annotations

import math
import time
from functools import lru_cache
from pathlib import Path
from typing import Any

import numpy as np

from bench.adversaries import Adversary
from bench.baselines import build_baseline
from bench.models import RegularizerEntry, RunSpec
from convex_sets.bodies import ConvexBody, build_body
from ftrl.learner import run_ftrl
from ftrl.models import RegretTrace
from regularizer.piecewise import PiecewiseRegularizer
from regularizer.serialization import deserialize
from shared.config import settings
from shared.core import log_context, logger
from shared.errors import FtrlSynthError, InputError
from shared.models import RunStatus

RUN_COLUMNS = [
    "run_id",
    "regularizer",
    "instance",
    "adversary",
    "horizon",
    "seed",
    "status",
    "regret",
    "regret_over_sqrt_t",
    "max_inner_gap",
    "uncertified_steps",
    "contract_violations",
    "error",
]


@lru_cache(maxsize=32)
def _load_regularizer_file(path: Path) -> PiecewiseRegularizer:
    return deserialize(path.read_bytes())


def build_regularizer(entry: RegularizerEntry, action_set: ConvexBody) -> Any:
    if entry.baseline is not None:
        return build_baseline(entry.baseline, action_set, entry.c)
    g = _load_regularizer_file(entry.path)
    if g.dim != action_set.dim:
        raise InputError(f"regularizer {entry.name!r} has dimension {g.dim}, action set {action_set.dim}")
    return g


def execute_trace(spec: RunSpec) -> RegretTrace:
    action_set = build_body(spec.instance.action_set)
    loss_set = build_body(spec.instance.loss_set)
    directions = np.asarray(spec.instance.directions, dtype=float) if spec.instance.directions else None
    adversary = Adversary(spec.adversary, loss_set, spec.seed, directions)
    g = build_regularizer(spec.regularizer, action_set)
    return run_ftrl(g, action_set, loss_set, adversary, spec.horizon, spec.inner, seed=spec.seed)


def execute_run(spec: RunSpec) -> dict[str, Any]:
    """One CSV row; a failing run is reported, not raised."""
    row: dict[str, Any] = {
        "run_id": spec.run_id,
        "regularizer": spec.regularizer.name,
        "instance": spec.instance.name,
        "adversary": spec.adversary.value,
        "horizon": spec.horizon,
        "seed": spec.seed,
    }
    started = time.perf_counter()
    with log_context(run=spec.run_id):
        try:
            trace = execute_trace(spec)
        except (FtrlSynthError, OSError) as e:
            logger.warning(f"Run failed: {e}")
            row.update(
                status=RunStatus.FAILED.value,
                regret=math.nan,
                regret_over_sqrt_t=math.nan,
                max_inner_gap=math.nan,
                uncertified_steps=0,
                contract_violations=0,
                error=f"{type(e).__name__}: {e}",
            )
        else:
            row.update(
                status=RunStatus.COMPLETED.value,
                regret=trace.final_regret,
                regret_over_sqrt_t=trace.final_regret / math.sqrt(spec.horizon),
                max_inner_gap=float(trace.inner_gaps.max()),
                uncertified_steps=trace.uncertified_steps,
                contract_violations=trace.contract_violations,
                error="",
            )
    if settings.report_timings:
        row["seconds"] = time.perf_counter() - started
    return row
