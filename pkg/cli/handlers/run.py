from __future__ import annotations

import math

import numpy as np
import pandas as pd

from bench.adversaries import Adversary
from bench.baselines import build_baseline
from cli.config import RunBlock
from cli.report import write_report
from convex_sets.bodies import build_body
from ftrl import InnerSolveConfig, RegretTrace, run_ftrl
from regularizer.serialization import deserialize
from shared.core import logger
from shared.digest import write_stamped_csv
from shared.errors import InputError
from shared.models import ExitCode


def trace_frame(trace: RegretTrace) -> pd.DataFrame:
    d = trace.actions.shape[1]
    frame = pd.DataFrame({"t": np.arange(1, trace.horizon + 1)})
    for k in range(d):
        frame[f"x_{k}"] = trace.actions[:, k]
    for k in range(d):
        frame[f"loss_{k}"] = trace.losses[:, k]
    frame["instantaneous_regret"] = np.diff(trace.cumulative_regret, prepend=0.0)
    frame["cumulative_regret"] = trace.cumulative_regret
    frame["inner_gap"] = trace.inner_gaps
    return frame


def handle(block: RunBlock, digest: str) -> ExitCode:
    action_set = build_body(block.action_set)
    loss_set = build_body(block.loss_set)
    if block.regularizer is not None:
        g = deserialize(block.regularizer.read_bytes())
        if g.dim != action_set.dim:
            raise InputError(f"regularizer has dimension {g.dim}, action set {action_set.dim}")
    else:
        g = build_baseline(block.baseline, action_set, block.c)

    directions = np.asarray(block.directions, dtype=float) if block.directions else None
    adversary = Adversary(block.adversary, loss_set, block.seed, directions)
    cfg = InnerSolveConfig(tol=block.tol, max_iter=block.max_iter, weighting=block.weighting, eta=block.eta)
    trace = run_ftrl(g, action_set, loss_set, adversary, block.rounds, cfg, seed=block.seed, config_digest=digest)

    write_stamped_csv(trace_frame(trace), block.trace_out, digest)
    logger.info(f"Trace of {trace.horizon} rounds written to {block.trace_out}, regret {trace.final_regret:.4g}")
    if block.report is not None:
        write_report(
            block.report,
            {
                "config_digest": digest,
                "rounds": trace.horizon,
                "seed": trace.seed,
                "adversary": block.adversary.value,
                "adversary_adaptive": adversary.adaptive,
                "eta": trace.meta["eta"],
                "weighting": trace.meta["weighting"],
                "regularizer_weight": trace.meta["regularizer_weight"],
                "regret": trace.final_regret,
                "regret_over_sqrt_t": trace.final_regret / math.sqrt(trace.horizon),
                "max_inner_gap": float(trace.inner_gaps.max()),
                "uncertified_steps": trace.uncertified_steps,
                "contract_violations": trace.contract_violations,
            },
        )
    return ExitCode.OK
