"""State and result types of the online loop."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Protocol

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt

from shared.models import Weighting


class InnerSolveConfig(BaseModel):
    """Accuracy of the per-round minimization of G_t."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    tol: PositiveFloat = 1e-6
    max_iter: PositiveInt = 500
    cache_size: PositiveInt = 2_000
    closed_form: bool = True
    weighting: Weighting = Weighting.DIRECT
    eta: PositiveFloat | None = Field(default=None, description="defaults to 1/sqrt(T)")

    @classmethod
    def accuracy_ladder(cls, alpha: float, r: float, R: float, horizon: int, **kwargs) -> "InnerSolveConfig":
        """tol = alpha r / (R^2 T)"""
        return cls(tol=alpha * r / (R**2 * horizon), **kwargs)


@dataclass(frozen=True)
class FtrlState:
    """``t`` counts observed losses, so a fresh state has t=0 and the last round is t=T-1."""

    cum_loss: np.ndarray
    eta: float
    horizon: int
    t: int = 0
    contract_violations: int = 0

    @classmethod
    def initial(cls, dim: int, horizon: int, eta: float | None = None) -> "FtrlState":
        eta = 1.0 / np.sqrt(horizon) if eta is None else eta
        return cls(cum_loss=np.zeros(dim), eta=float(eta), horizon=horizon)

    @property
    def dim(self) -> int:
        return len(self.cum_loss)

    @property
    def finished(self) -> bool:
        return self.t >= self.horizon

    def advance(self, loss: np.ndarray, violated: bool) -> "FtrlState":
        return replace(
            self,
            cum_loss=self.cum_loss + loss,
            t=self.t + 1,
            contract_violations=self.contract_violations + int(violated),
        )


@dataclass(frozen=True)
class InnerSolveResult:
    x: np.ndarray
    value: float
    lower_bound: float
    iterations: int
    certified: bool
    closed_form: bool = False

    @property
    def gap(self) -> float:
        return max(0.0, self.value - self.lower_bound)


class LossSource(Protocol):
    """Anything that answers an action with a loss vector."""

    def reset(self) -> None: ...

    def next_loss(self, t: int, x: np.ndarray) -> np.ndarray: ...


@dataclass
class RegretTrace:
    actions: np.ndarray
    losses: np.ndarray
    cumulative_regret: np.ndarray
    inner_gaps: np.ndarray
    config_digest: str = ""
    seed: int = 0
    uncertified_steps: int = 0
    contract_violations: int = 0
    meta: dict[str, str | float | int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        lengths = {len(self.actions), len(self.losses), len(self.cumulative_regret), len(self.inner_gaps)}
        if len(lengths) != 1:
            raise ValueError(f"trace arrays disagree on length: {sorted(lengths)}")

    @property
    def horizon(self) -> int:
        return len(self.actions)

    @property
    def final_regret(self) -> float:
        return float(self.cumulative_regret[-1]) if self.horizon else 0.0
