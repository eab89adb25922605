"""Value types of the synthesis program."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, model_validator

from shared.digest import config_digest
from shared.models import CutFamily, LocalityMargin, SolveStatus

# invariants are checked with a little relative headroom for float round-off
_REL_SLACK = 1e-9


class SynthesisConfig(BaseModel):
    """Constants of the program plus solver knobs."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    dim: PositiveInt
    eps_bar: PositiveFloat
    eps: PositiveFloat
    L: PositiveFloat
    alpha: PositiveFloat
    c0: PositiveFloat
    c2: PositiveFloat
    C0: PositiveFloat
    delta_m: PositiveFloat
    delta_lin: PositiveFloat
    eps_tilde: PositiveFloat
    r_inner: PositiveFloat
    R_outer: PositiveFloat
    c_guess: PositiveFloat = 1.0
    cut_tolerance: PositiveFloat = 1e-6
    max_rounds: PositiveInt = 200
    cuts_per_center: PositiveInt = 4
    locality_margin: LocalityMargin = LocalityMargin.PROGRAM
    theory: dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_margins(self) -> "SynthesisConfig":
        problems = []
        lin_cap = min(self.delta_m / 4.0, self.r_inner * self.delta_m / 2.0)
        if self.delta_lin > lin_cap * (1 + _REL_SLACK):
            problems.append(f"delta_lin={self.delta_lin:g} exceeds min(delta_m/4, r*delta_m/2)={lin_cap:g}")
        cover_cap = self.alpha * self.r_inner**3 * self.delta_m / (self.c2 * self.R_outer)
        if self.eps_tilde > cover_cap * (1 + _REL_SLACK):
            problems.append(f"eps_tilde={self.eps_tilde:g} exceeds alpha*r^3*delta_m/(c2*R)={cover_cap:g}")
        if self.eps_tilde > 1.0:
            problems.append(f"eps_tilde={self.eps_tilde:g} must be at most 1")
        if self.eps > math.sqrt(self.dim) * self.eps_bar * (1 + _REL_SLACK):
            problems.append(f"eps={self.eps:g} exceeds sqrt(d)*eps_bar")
        if self.r_inner > self.R_outer:
            problems.append("r_inner exceeds R_outer")
        if problems:
            raise ValueError("; ".join(problems))
        return self

    @property
    def c1(self) -> float:
        return math.sqrt(self.dim) * self.c0

    @property
    def locality_coefficient(self) -> float:
        if self.locality_margin is LocalityMargin.CONDITION:
            return 1.0 / 96.0
        return 17.0 / 96.0

    @property
    def locality_radius(self) -> float:
        return 4.0 * (self.eps * math.sqrt(self.dim) * self.c0 / self.L) ** (1.0 / 3.0)

    @property
    def infeasibility_precheck(self) -> bool:
        """alpha > c2/r^2 cannot be met: dual norms are at least r*|v|."""
        return self.alpha > self.c2 / self.r_inner**2

    def digest(self) -> str:
        return config_digest(self.model_dump(mode="json"))


@dataclass(frozen=True)
class DiscretizationGrid:
    centers: np.ndarray
    spacing: float

    @property
    def count(self) -> int:
        return len(self.centers)

    @property
    def dim(self) -> int:
        return self.centers.shape[1]


@dataclass(frozen=True)
class ProgramInstance:
    r: float
    values: np.ndarray
    grads: np.ndarray
    hessians: np.ndarray

    @property
    def count(self) -> int:
        return len(self.values)

    def replace(self, **changes: Any) -> "ProgramInstance":
        fields = {"r": self.r, "values": self.values, "grads": self.grads, "hessians": self.hessians}
        fields.update(changes)
        return ProgramInstance(**fields)


@dataclass(frozen=True)
class ConstraintCut:
    """sum(coefficients * I[indices]) <= rhs over the flattened instance vector."""

    indices: tuple[int, ...]
    coefficients: tuple[float, ...]
    rhs: float
    family: CutFamily
    tag: tuple[int, ...]

    def __post_init__(self) -> None:
        if not any(self.coefficients):
            raise ValueError(f"{self.family.value}{self.tag}: cut functional is zero")

    @property
    def sort_key(self) -> tuple[str, tuple[int, ...]]:
        return self.family.value, self.tag

    def coefficient(self, index: int) -> float:
        return sum(c for i, c in zip(self.indices, self.coefficients) if i == index)

    def evaluate(self, vector: np.ndarray) -> float:
        """Violation amount: lhs - rhs."""
        return float(np.dot(vector[list(self.indices)], self.coefficients) - self.rhs)


@dataclass
class SolveReport:
    status: SolveStatus
    objective: float
    n_centers: int
    rounds: int
    cut_counts: dict[str, int] = field(default_factory=dict)
    max_violation: float = 0.0
    max_strong_convexity_violation: float = 0.0
    max_psd_violation: float = 0.0
    lp_seconds: float = 0.0

    @property
    def certified(self) -> bool:
        return self.status is SolveStatus.CERTIFIED


@dataclass(frozen=True)
class ProgramSolution:
    instance: ProgramInstance
    grid: DiscretizationGrid
    config: SynthesisConfig
    report: SolveReport


@dataclass
class ValidationReport:
    tolerance: float
    family_violations: dict[str, float]
    g_min: float
    g_max: float
    range_bound: float
    value_bound: float
    sampled_min_slack: float | None = None
    sampled_passed: bool | None = None
    locality_failures: int = 0
    locality_max_distance: float = 0.0
    locality_radius: float = 0.0
    tolerance_factor: float = 2.0

    @property
    def family_passed(self) -> dict[str, bool]:
        limit = self.tolerance_factor * self.tolerance
        return {name: v <= limit for name, v in self.family_violations.items()}

    @property
    def value_range(self) -> float:
        return self.g_max - self.g_min

    @property
    def range_within_c0(self) -> bool:
        """Sampled max - min of g against C0 alone, without the cover slack in range_bound."""
        return self.value_range <= self.value_bound

    @property
    def passed(self) -> bool:
        sampled_ok = self.sampled_passed is not False
        return all(self.family_passed.values()) and sampled_ok and self.g_max <= self.range_bound
