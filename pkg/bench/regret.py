"""Regret accounting and empirical rate estimates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from convex_sets.bodies import ConvexBody
from ftrl.models import RegretTrace
from ftrl.regret import cumulative_regret
from shared.errors import RateEstimateError

# estimates growing by more than this fraction from the smallest to the largest horizon do not converge
GROWTH_TOLERANCE = 0.25

__all__ = ["GROWTH_TOLERANCE", "RateEstimate", "best_fixed_action", "cumulative_regret", "rate_estimate", "regret", "traces_frame"]


def best_fixed_action(cum_loss: np.ndarray, action_set: ConvexBody, delta_lin: float | None = None) -> np.ndarray:
    cum_loss = np.asarray(cum_loss, dtype=float)
    if not np.any(cum_loss):
        return action_set.interior_point()
    return action_set.linear_minimize(cum_loss, delta_lin)


def regret(trace: RegretTrace, action_set: ConvexBody) -> np.ndarray:
    return cumulative_regret(trace.actions, trace.losses, action_set)


@dataclass
class RateEstimate:
    headline: float
    table: pd.DataFrame
    growth: float

    @property
    def converging(self) -> bool:
        return self.growth <= GROWTH_TOLERANCE


def rate_estimate(runs: pd.DataFrame) -> RateEstimate:
    """Per horizon: max over adversaries of the mean regret, divided by sqrt(T).

    ``runs`` needs columns ``horizon``, ``seed`` and ``regret``; an
    ``adversary`` column is optional.
    """
    missing = {"horizon", "seed", "regret"} - set(runs.columns)
    if missing:
        raise RateEstimateError(f"runs table is missing columns: {sorted(missing)}")
    runs = runs.copy()
    if "adversary" not in runs.columns:
        runs["adversary"] = "-"

    horizons = sorted(runs["horizon"].unique())
    problems = []
    if len(horizons) < 2:
        problems.append(f"need at least 2 horizons, got {len(horizons)}")
    seeds = runs.groupby(["horizon", "adversary"])["seed"].nunique()
    for (horizon, adversary), count in seeds.items():
        if count < 2:
            problems.append(f"horizon {horizon} ({adversary}) has {count} seed(s), need at least 2")
    if problems:
        raise RateEstimateError(problems)

    means = runs.groupby(["horizon", "adversary"])["regret"].agg(["mean", "std", "count"]).reset_index()
    worst = means.loc[means.groupby("horizon")["mean"].idxmax()].sort_values("horizon").reset_index(drop=True)
    worst["rate"] = worst["mean"] / np.sqrt(worst["horizon"].astype(float))
    table = worst.rename(columns={"mean": "mean_regret", "std": "sd_regret", "count": "seeds"})

    rates = table["rate"].to_numpy()
    growth = rates[-1] / rates[0] - 1.0 if rates[0] > 0 else (np.inf if rates[-1] > 0 else 0.0)
    return RateEstimate(headline=float(rates[-1]), table=table, growth=float(growth))


def traces_frame(traces: list[tuple[str, RegretTrace]]) -> pd.DataFrame:
    """(adversary, trace) pairs as a runs table for rate_estimate"""
    return pd.DataFrame(
        [
            {"adversary": adversary, "horizon": t.horizon, "seed": t.seed, "regret": t.final_regret}
            for adversary, t in traces
        ]
    )
