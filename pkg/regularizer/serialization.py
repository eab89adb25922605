"""JSON documents for piecewise regularizers.

Floats go through the standard ``json`` module (shortest round-trip repr),
so a serialize/deserialize cycle is bit-exact. Pydantic only checks shape.
"""
from __future__ import annotations

import json
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from convex_sets.models import BodySpec
from regularizer.piecewise import PiecewiseRegularizer
from regularizer.pieces import QuasiQuadraticPiece
from shared.errors import InputError, RegularizerFormatError

FORMAT_NAME = "ftrl-regularizer"
FORMAT_VERSION = 1


class PieceDocument(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    center: list[float]
    value: float
    grad: list[float]
    sigma: list[float]


class RegularizerDocument(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    format: str = FORMAT_NAME
    version: int = FORMAT_VERSION
    dim: int = Field(ge=1)
    cubic_L: float = Field(ge=0)
    alpha: float
    value_bound: float | None = None
    loss_body: BodySpec | None = None
    provenance: dict[str, Any] = Field(default_factory=dict)
    pieces: list[PieceDocument] = Field(min_length=1)

    @model_validator(mode="after")
    def check_shapes(self) -> "RegularizerDocument":
        if self.format != FORMAT_NAME:
            raise ValueError(f"unknown format {self.format!r}")
        width = self.dim * (self.dim + 1) // 2
        for i, piece in enumerate(self.pieces):
            if len(piece.center) != self.dim or len(piece.grad) != self.dim:
                raise ValueError(f"pieces.{i}: center/grad must have {self.dim} entries")
            if len(piece.sigma) != width:
                raise ValueError(f"pieces.{i}: sigma must hold the {width} upper-triangle entries")
        return self


def _upper(matrix: np.ndarray) -> list[float]:
    rows, cols = np.triu_indices(matrix.shape[0])
    return [float(v) for v in matrix[rows, cols]]


def _symmetric(entries: list[float], dim: int) -> np.ndarray:
    matrix = np.zeros((dim, dim))
    rows, cols = np.triu_indices(dim)
    matrix[rows, cols] = entries
    matrix[cols, rows] = entries
    return matrix


def to_document(g: PiecewiseRegularizer) -> RegularizerDocument:
    return RegularizerDocument(
        dim=g.dim,
        cubic_L=g.cubic_L,
        alpha=g.alpha,
        value_bound=g.value_bound,
        loss_body=g.loss_body,
        provenance=dict(g.provenance),
        pieces=[
            PieceDocument(
                center=[float(c) for c in p.center],
                value=p.value,
                grad=[float(c) for c in p.grad],
                sigma=_upper(p.hess),
            )
            for p in g.pieces
        ],
    )


def serialize(g: PiecewiseRegularizer) -> bytes:
    payload = to_document(g).model_dump(mode="python")
    if payload["loss_body"] is not None:
        payload["loss_body"] = g.loss_body.model_dump(mode="json")
    return json.dumps(payload, indent=1, sort_keys=True, allow_nan=False).encode("utf-8")


def deserialize(data: bytes | str) -> PiecewiseRegularizer:
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as e:
        raise RegularizerFormatError(e.msg, location=f"line {e.lineno} column {e.colno}") from e
    except UnicodeDecodeError as e:
        raise RegularizerFormatError("not UTF-8 text", location=f"byte {e.start}") from e

    try:
        document = RegularizerDocument.model_validate(payload)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(p) for p in first["loc"]) or "<document>"
        messages = "; ".join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors())
        raise RegularizerFormatError(messages, location=location) from e

    try:
        pieces = tuple(
            QuasiQuadraticPiece(
                center=np.array(p.center),
                value=p.value,
                grad=np.array(p.grad),
                hess=_symmetric(p.sigma, document.dim),
                cubic_L=document.cubic_L,
            )
            for p in document.pieces
        )
        return PiecewiseRegularizer(
            pieces=pieces,
            alpha=document.alpha,
            loss_body=document.loss_body,
            provenance=document.provenance,
            value_bound=document.value_bound,
        )
    except InputError as e:
        raise RegularizerFormatError(str(e), location="pieces") from e
