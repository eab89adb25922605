"""Run configuration: one block per subcommand, validated as a whole."""
from __future__ import annotations

import json
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    ValidationError,
    ValidationInfo,
    field_validator,
    model_validator,
)

from convex_sets.bodies import build_body
from convex_sets.models import BodySpec, resolve_body_ref
from shared.digest import config_digest
from shared.errors import ConfigValidationError, FtrlSynthError
from shared.models import AdversaryKind, BaselineKind, LocalityMargin, Weighting


class Command(str, Enum):
    SYNTHESIZE = "synthesize"
    RUN = "run"
    BENCH = "bench"
    CHECK = "check"


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    @field_validator("action_set", "loss_set", mode="before", check_fields=False)
    @classmethod
    def load_body_files(cls, v: Any, info: ValidationInfo) -> Any:
        return resolve_body_ref(v, (info.context or {}).get("base_dir"))


class SynthesizeBlock(_Block):
    action_set: BodySpec
    loss_set: BodySpec
    out: Path
    report: Path
    eps_bar: PositiveFloat | None = None
    alpha: PositiveFloat | None = None
    c_guess: PositiveFloat | None = None
    margin: PositiveFloat | None = None
    c2: PositiveFloat | None = None
    L: PositiveFloat | None = None
    locality_margin: LocalityMargin | None = None
    doubling: bool = True
    max_doublings: NonNegativeInt | None = None
    validate_output: bool = True
    samples: NonNegativeInt = 1_000
    seed: NonNegativeInt = 0
    metrics_out: Path | None = None

    @model_validator(mode="after")
    def infeasibility_precheck(self) -> "SynthesizeBlock":
        if self.c2 is None or self.alpha is None:
            return self
        try:
            a, b = build_body(self.action_set).radii, build_body(self.loss_set).radii
        except FtrlSynthError as e:
            raise ValueError(str(e)) from e
        r = min(a.r_inner, b.r_inner)
        if self.alpha > self.c2 / r**2:
            raise ValueError(
                f"infeasibility precheck: alpha={self.alpha:g} exceeds c2/r^2={self.c2 / r**2:g}, "
                "strong-convexity cuts would contradict the Hessian upper bound"
            )
        return self

    def overrides(self) -> dict[str, Any]:
        names = ("eps_bar", "alpha", "margin", "c2", "L", "locality_margin")
        return {name: getattr(self, name) for name in names if getattr(self, name) is not None}


class RunBlock(_Block):
    action_set: BodySpec
    loss_set: BodySpec
    trace_out: Path
    regularizer: Path | None = None
    baseline: BaselineKind | None = None
    c: PositiveFloat = 1.0
    adversary: AdversaryKind = AdversaryKind.IID_EXTREME
    directions: list[list[float]] | None = None
    rounds: PositiveInt = 100
    seed: NonNegativeInt = 0
    eta: PositiveFloat | None = None
    weighting: Weighting = Weighting.DIRECT
    tol: PositiveFloat = 1e-6
    max_iter: PositiveInt = 500
    report: Path | None = None

    @model_validator(mode="after")
    def exactly_one_regularizer(self) -> "RunBlock":
        if (self.regularizer is None) == (self.baseline is None):
            raise ValueError("give exactly one of 'regularizer' or 'baseline'")
        return self


class BenchBlock(_Block):
    suite: Path
    out_dir: Path


class CheckBlock(_Block):
    regularizer: Path
    report: Path
    loss_set: BodySpec | None = None
    action_set: BodySpec | None = None
    alpha: PositiveFloat | None = None
    samples: PositiveInt = 1_000
    seed: NonNegativeInt = 0
    inner_fraction: float = Field(default=0.5, gt=0.0, le=1.0)


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Command
    synthesize: SynthesizeBlock | None = None
    run: RunBlock | None = None
    bench: BenchBlock | None = None
    check: CheckBlock | None = None

    @model_validator(mode="after")
    def block_for_command(self) -> "RunConfig":
        if getattr(self, self.command.value) is None:
            raise ValueError(f"command {self.command.value!r} needs a {self.command.value!r} block")
        return self

    @property
    def block(self) -> _Block:
        return getattr(self, self.command.value)

    def digest(self) -> str:
        return config_digest(self.model_dump(mode="json"))


def _messages(exc: ValidationError) -> list[str]:
    return [f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in exc.errors()]


def build_config(payload: dict[str, Any], base_dir: Path | None = None) -> RunConfig:
    try:
        return RunConfig.model_validate(payload, context={"base_dir": base_dir})
    except ValidationError as e:
        raise ConfigValidationError(_messages(e)) from e


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a config file, reporting every violation at once."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigValidationError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e
    return build_config(payload, path.parent)
