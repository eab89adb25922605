"""Schemas for body description files and the small value types the oracles return."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, field_serializer, field_validator

from shared.models import BodyKind


class BodySpec(BaseModel):
    """``{kind, dim, params}`` as stored in a body description file."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: BodyKind
    dim: int = Field(ge=1)
    params: dict[str, Any] = Field(default_factory=dict)


# ==================== Kind-specific parameters ====================

class _Params(BaseModel):
    model_config = ConfigDict(extra="forbid")


class BallParams(_Params):
    radius: PositiveFloat = 1.0


class LpBallParams(_Params):
    p: float = Field(ge=1.0)
    radius: PositiveFloat = 1.0

    @field_validator("p", mode="before")
    @classmethod
    def parse_infinity(cls, v: Any) -> Any:
        if isinstance(v, str) and v.strip().lower() in {"inf", "infinity"}:
            return math.inf
        return v

    @field_serializer("p")
    def dump_p(self, p: float) -> float | str:
        return "inf" if math.isinf(p) else p


class BoxParams(_Params):
    halfwidths: list[PositiveFloat]
    center: list[float] | None = None


class EllipsoidParams(_Params):
    shape: list[list[float]]


class VertexParams(_Params):
    vertices: list[list[float]] = Field(min_length=2)


class HalfspaceParams(_Params):
    normals: list[list[float]] = Field(min_length=2)
    offsets: list[PositiveFloat] = Field(min_length=2)


class SimplexParams(_Params):
    pass


# ==================== Oracle results ====================

@dataclass(frozen=True)
class BodyMetadata:
    r_inner: float
    R_outer: float


@dataclass(frozen=True)
class Separation:
    """Either ``inside`` or a unit ``normal`` c with <c, y> <= <c, x> for x in the body."""

    inside: bool
    normal: np.ndarray | None = None

    @classmethod
    def certified(cls) -> "Separation":
        return cls(inside=True)

    @classmethod
    def cut(cls, direction: np.ndarray) -> "Separation":
        return cls(inside=False, normal=direction / np.linalg.norm(direction))


def resolve_body_ref(value: Any, base_dir: Path | None = None) -> Any:
    """A body given as a file path becomes the parsed file contents; anything else passes through."""
    if not isinstance(value, (str, Path)):
        return value
    path = Path(value)
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ValueError(f"cannot read body file {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e
