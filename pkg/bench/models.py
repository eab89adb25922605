"""Schemas of a benchmark suite file and of one run."""
from __future__ import annotations

from pathlib import Path
from typing import Any

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    ValidationInfo,
    field_validator,
    model_validator,
)

from convex_sets.models import BodySpec, resolve_body_ref
from ftrl.models import InnerSolveConfig
from shared.digest import config_digest
from shared.models import AdversaryKind, BaselineKind


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class RegularizerEntry(_Strict):
    """Either a baseline or a synthesized regularizer file."""

    name: str
    baseline: BaselineKind | None = None
    c: PositiveFloat = 1.0
    path: Path | None = None

    @model_validator(mode="after")
    def exactly_one_source(self) -> "RegularizerEntry":
        if (self.baseline is None) == (self.path is None):
            raise ValueError(f"regularizer {self.name!r} needs exactly one of 'baseline' or 'path'")
        return self

    @field_validator("path", mode="after")
    @classmethod
    def anchor_path(cls, v: Path | None, info: ValidationInfo) -> Path | None:
        base = (info.context or {}).get("base_dir")
        if v is not None and base is not None and not v.is_absolute():
            return Path(base) / v
        return v


class InstanceEntry(_Strict):
    name: str
    action_set: BodySpec
    loss_set: BodySpec
    directions: list[list[float]] | None = Field(default=None, description="adversary loss list override")

    @field_validator("action_set", "loss_set", mode="before")
    @classmethod
    def load_body_files(cls, v: Any, info: ValidationInfo) -> Any:
        return resolve_body_ref(v, (info.context or {}).get("base_dir"))

    @model_validator(mode="after")
    def same_dimension(self) -> "InstanceEntry":
        if self.action_set.dim != self.loss_set.dim:
            raise ValueError(
                f"instance {self.name!r}: action set is {self.action_set.dim}-dimensional, loss set {self.loss_set.dim}"
            )
        return self


class BenchSuite(_Strict):
    regularizers: list[RegularizerEntry] = Field(min_length=1)
    instances: list[InstanceEntry] = Field(min_length=1)
    adversaries: list[AdversaryKind] = Field(min_length=1)
    horizons: list[PositiveInt] = Field(min_length=1)
    seeds: list[NonNegativeInt] = Field(min_length=1)
    inner: InnerSolveConfig = Field(default_factory=InnerSolveConfig)

    @model_validator(mode="after")
    def unique_names(self) -> "BenchSuite":
        problems = []
        for what, names in (("regularizer", [r.name for r in self.regularizers]), ("instance", [i.name for i in self.instances])):
            duplicates = sorted({n for n in names if names.count(n) > 1})
            if duplicates:
                problems.append(f"duplicate {what} names: {duplicates}")
        if problems:
            raise ValueError("; ".join(problems))
        return self

    def digest(self) -> str:
        return config_digest(self.model_dump(mode="json"))

    def run_specs(self) -> list["RunSpec"]:
        """Cross product in canonical run-id order."""
        specs = [
            RunSpec(regularizer=reg, instance=inst, adversary=adv, horizon=horizon, seed=seed, inner=self.inner)
            for reg in self.regularizers
            for inst in self.instances
            for adv in self.adversaries
            for horizon in self.horizons
            for seed in self.seeds
        ]
        return sorted(specs, key=lambda s: s.sort_key)


class RunSpec(_Strict):
    regularizer: RegularizerEntry
    instance: InstanceEntry
    adversary: AdversaryKind
    horizon: PositiveInt
    seed: NonNegativeInt
    inner: InnerSolveConfig = Field(default_factory=InnerSolveConfig)

    @property
    def run_id(self) -> str:
        return f"{self.regularizer.name}/{self.instance.name}/{self.adversary.value}/T{self.horizon}/s{self.seed}"

    @property
    def sort_key(self) -> tuple[str, str, str, int, int]:
        return self.regularizer.name, self.instance.name, self.adversary.value, self.horizon, self.seed
