"""Convex bodies and their oracles.

Every body answers membership, linear optimization, support, gauge, dual
gauge and separation queries. Closed forms are used where they exist; the
gauge falls back to bisection on membership over the bracket given by the
inner and outer radii.
"""
from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from functools import cached_property
from pathlib import Path
from typing import Any, ClassVar

import numpy as np
from pydantic import ValidationError
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError

from convex_sets.models import (
    BallParams,
    BodyMetadata,
    BodySpec,
    BoxParams,
    EllipsoidParams,
    HalfspaceParams,
    LpBallParams,
    Separation,
    SimplexParams,
    VertexParams,
)
from shared.config import settings
from shared.core import logger
from shared.errors import (
    ConfigValidationError,
    DegenerateBodyError,
    InputError,
    SymmetryError,
)
from shared.lp import solve_lp
from shared.models import BodyKind

_SYMMETRY_TOL = 1e-10


def _validation_messages(exc: ValidationError, prefix: str) -> list[str]:
    return [
        f"{prefix}.{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
        for err in exc.errors()
    ]


# ==================== Base Body ====================

class ConvexBody(ABC):
    kind: ClassVar[BodyKind]
    params_model: ClassVar[type]

    def __init__(self, dim: int):
        self.dim = dim

    def __repr__(self) -> str:
        return f"<{type(self).__name__} dim={self.dim}>"

    # --- construction -----------------------------------------------------

    @classmethod
    def from_spec(cls, spec: BodySpec) -> "ConvexBody":
        try:
            params = cls.params_model.model_validate(spec.params)
        except ValidationError as e:
            raise ConfigValidationError(_validation_messages(e, "params")) from e
        return cls._build(spec.dim, params)

    @classmethod
    @abstractmethod
    def _build(cls, dim: int, params: Any) -> "ConvexBody": ...

    @property
    @abstractmethod
    def spec(self) -> BodySpec: ...

    @property
    def is_symmetric(self) -> bool:
        return True

    def _vector(self, y: Any) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape != (self.dim,):
            raise InputError(f"expected a vector of dimension {self.dim}, got shape {y.shape}")
        return y

    def _rows(self, ys: Any) -> np.ndarray:
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        if ys.shape[1] != self.dim:
            raise InputError(f"expected rows of dimension {self.dim}, got shape {ys.shape}")
        return ys

    def _require_symmetric(self, what: str) -> None:
        if not self.is_symmetric:
            raise SymmetryError(f"{what} requires a centrally symmetric body, got {self.kind.value}")

    # --- membership -------------------------------------------------------

    def membership(self, y: Any, delta: float | None = None) -> bool:
        delta = settings.membership_tol if delta is None else delta
        if delta <= 0:
            raise InputError("membership tolerance must be positive")
        return bool(self.contains_many(self._vector(y)[None, :], delta)[0])

    @abstractmethod
    def contains_many(self, ys: np.ndarray, delta: float) -> np.ndarray:
        """Row-wise membership; ``delta=0`` is allowed internally."""

    def _gauge_shell(self, gauges: np.ndarray, delta: float) -> np.ndarray:
        # gauge <= 1 + delta/R keeps every accepted point within delta of the body
        return gauges <= 1.0 + delta / self.radii.R_outer

    # --- linear optimization ------------------------------------------------

    def linear_minimize(self, c: Any, delta_lin: float | None = None) -> np.ndarray:
        c = self._vector(c)
        if not np.any(c):
            raise InputError("linear_minimize needs a nonzero direction")
        return self._linear_minimize(c)

    @abstractmethod
    def _linear_minimize(self, c: np.ndarray) -> np.ndarray: ...

    def support(self, v: Any, delta_lin: float | None = None) -> float:
        v = self._vector(v)
        if not np.any(v):
            raise InputError("support needs a nonzero direction")
        return float(self.support_many(v[None, :])[0])

    def support_many(self, vs: np.ndarray) -> np.ndarray:
        """max over the body of <v, w>, row-wise; zero rows map to 0."""
        vs = self._rows(vs)
        out = np.zeros(len(vs))
        for k, v in enumerate(vs):
            if np.any(v):
                out[k] = float(v @ self._linear_minimize(-v))
        return out

    def dual_gauge(self, v: Any, delta_lin: float | None = None) -> float:
        self._require_symmetric("dual_gauge")
        return self.support(v, delta_lin)

    def dual_gauge_many(self, vs: np.ndarray) -> np.ndarray:
        self._require_symmetric("dual_gauge")
        return self.support_many(vs)

    # --- gauge --------------------------------------------------------------

    def gauge(self, v: Any, tol: float = 1e-12) -> float:
        self._require_symmetric("gauge")
        v = self._vector(v)
        if not np.any(v):
            return 0.0
        closed = self._gauge_closed_form(v[None, :])
        if closed is not None:
            return float(closed[0])
        return self._gauge_bisection(v, tol)

    def _gauge_closed_form(self, vs: np.ndarray) -> np.ndarray | None:
        return None

    def _gauge_bisection(self, v: np.ndarray, tol: float) -> float:
        norm = float(np.linalg.norm(v))
        lo, hi = norm / self.radii.R_outer, norm / self.radii.r_inner
        if self.contains_many((v / lo)[None, :], 0.0)[0]:
            return lo
        for _ in range(settings.gauge_max_iter):
            if hi - lo <= tol * hi:
                break
            mid = 0.5 * (lo + hi)
            if self.contains_many((v / mid)[None, :], 0.0)[0]:
                hi = mid
            else:
                lo = mid
        return hi

    # --- separation ---------------------------------------------------------

    def separation(self, y: Any, delta: float | None = None) -> Separation:
        delta = settings.membership_tol if delta is None else delta
        if delta <= 0:
            raise InputError("separation tolerance must be positive")
        return self._separate(self._vector(y), delta)

    @abstractmethod
    def _separate(self, y: np.ndarray, delta: float) -> Separation: ...

    # --- geometry -----------------------------------------------------------

    @cached_property
    def radii(self) -> BodyMetadata:
        self._require_symmetric("inner_outer_radii")
        r, R = self._radii()
        if not r > 0:
            raise DegenerateBodyError(f"{self.kind.value} has inner radius {r}")
        return BodyMetadata(r_inner=float(r), R_outer=float(R))

    def inner_outer_radii(self) -> BodyMetadata:
        return self.radii

    @abstractmethod
    def _radii(self) -> tuple[float, float]: ...

    @abstractmethod
    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]: ...

    def interior_point(self) -> np.ndarray:
        return np.zeros(self.dim)

    @abstractmethod
    def extreme_points(self) -> np.ndarray:
        """Finite list of boundary points used by adversaries."""

    def project(self, y: np.ndarray) -> np.ndarray | None:
        """Closed-form Euclidean projection, or None when there is none."""
        return None

    def halfspaces(self) -> tuple[np.ndarray, np.ndarray] | None:
        """Exact ``A x <= b`` description when the body is polyhedral."""
        return None


# ==================== Kinds ====================

class EuclideanBall(ConvexBody):
    kind = BodyKind.EUCLIDEAN_BALL
    params_model = BallParams

    def __init__(self, dim: int, radius: float = 1.0):
        super().__init__(dim)
        self.radius = float(radius)

    @classmethod
    def _build(cls, dim: int, params: BallParams) -> "EuclideanBall":
        return cls(dim, params.radius)

    @property
    def spec(self) -> BodySpec:
        return BodySpec(kind=self.kind, dim=self.dim, params={"radius": self.radius})

    def contains_many(self, ys: np.ndarray, delta: float) -> np.ndarray:
        return np.linalg.norm(self._rows(ys), axis=1) <= self.radius + delta

    def _linear_minimize(self, c: np.ndarray) -> np.ndarray:
        return -self.radius * c / np.linalg.norm(c)

    def support_many(self, vs: np.ndarray) -> np.ndarray:
        return self.radius * np.linalg.norm(self._rows(vs), axis=1)

    def _gauge_closed_form(self, vs: np.ndarray) -> np.ndarray:
        return np.linalg.norm(vs, axis=1) / self.radius

    def _separate(self, y: np.ndarray, delta: float) -> Separation:
        norm = np.linalg.norm(y)
        if norm <= self.radius + delta:
            return Separation.certified()
        return Separation.cut(-y)

    def _radii(self) -> tuple[float, float]:
        return self.radius, self.radius

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return -self.radius * np.ones(self.dim), self.radius * np.ones(self.dim)

    def extreme_points(self) -> np.ndarray:
        eye = np.eye(self.dim) * self.radius
        return np.stack([s * row for row in eye for s in (1.0, -1.0)])

    def project(self, y: np.ndarray) -> np.ndarray:
        norm = np.linalg.norm(y)
        return y if norm <= self.radius else self.radius * y / norm


class LpBall(ConvexBody):
    kind = BodyKind.LP_BALL
    params_model = LpBallParams

    def __init__(self, dim: int, p: float, radius: float = 1.0):
        super().__init__(dim)
        if p < 1:
            raise ConfigValidationError(f"lp-ball exponent must be >= 1, got {p}")
        self.p = float(p)
        self.radius = float(radius)
        if self.p == 1.0:
            self.q = math.inf
        elif math.isinf(self.p):
            self.q = 1.0
        else:
            self.q = self.p / (self.p - 1.0)

    @classmethod
    def _build(cls, dim: int, params: LpBallParams) -> "LpBall":
        return cls(dim, params.p, params.radius)

    @property
    def spec(self) -> BodySpec:
        params = LpBallParams(p=self.p, radius=self.radius).model_dump(mode="json")
        return BodySpec(kind=self.kind, dim=self.dim, params=params)

    def _norm(self, vs: np.ndarray, order: float) -> np.ndarray:
        return np.linalg.norm(vs, ord=order, axis=1)

    def contains_many(self, ys: np.ndarray, delta: float) -> np.ndarray:
        return self._gauge_shell(self._norm(self._rows(ys), self.p) / self.radius, delta)

    def _linear_minimize(self, c: np.ndarray) -> np.ndarray:
        if self.p == 1.0:
            k = int(np.argmax(np.abs(c)))
            y = np.zeros(self.dim)
            y[k] = -self.radius * np.sign(c[k])
            return y
        if math.isinf(self.p):
            return -self.radius * np.sign(c)
        weights = np.sign(c) * np.abs(c) ** (self.q - 1.0)
        return -self.radius * weights / np.linalg.norm(c, ord=self.q) ** (self.q - 1.0)

    def support_many(self, vs: np.ndarray) -> np.ndarray:
        return self.radius * self._norm(self._rows(vs), self.q)

    def _gauge_closed_form(self, vs: np.ndarray) -> np.ndarray:
        return self._norm(vs, self.p) / self.radius

    def _separate(self, y: np.ndarray, delta: float) -> Separation:
        if self.contains_many(y[None, :], delta)[0]:
            return Separation.certified()
        # gradient of the p-norm at y
        if self.p == 1.0:
            grad = np.sign(y)
        elif math.isinf(self.p):
            k = int(np.argmax(np.abs(y)))
            grad = np.zeros(self.dim)
            grad[k] = np.sign(y[k])
        else:
            grad = np.sign(y) * np.abs(y) ** (self.p - 1.0)
        return Separation.cut(-grad)

    def _radii(self) -> tuple[float, float]:
        inv_p = 0.0 if math.isinf(self.p) else 1.0 / self.p
        scale = self.dim ** (0.5 - inv_p)
        if self.p <= 2.0:
            return self.radius * scale, self.radius
        return self.radius, self.radius * scale

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return -self.radius * np.ones(self.dim), self.radius * np.ones(self.dim)

    def extreme_points(self) -> np.ndarray:
        if math.isinf(self.p):
            return _one_hot_vertices(-self.radius * np.ones(self.dim), self.radius * np.ones(self.dim))
        eye = np.eye(self.dim) * self.radius
        return np.stack([s * row for row in eye for s in (1.0, -1.0)])

    def project(self, y: np.ndarray) -> np.ndarray | None:
        if self.p == 2.0:
            norm = np.linalg.norm(y)
            return y if norm <= self.radius else self.radius * y / norm
        if math.isinf(self.p):
            return np.clip(y, -self.radius, self.radius)
        return None


class Box(ConvexBody):
    """Axis-aligned box ``center ± halfwidths``; symmetric only when centred at 0."""

    kind = BodyKind.BOX
    params_model = BoxParams

    def __init__(self, halfwidths: Any, center: Any | None = None):
        halfwidths = np.asarray(halfwidths, dtype=float)
        super().__init__(len(halfwidths))
        self.halfwidths = halfwidths
        self.center = np.zeros(self.dim) if center is None else np.asarray(center, dtype=float)
        if self.center.shape != self.halfwidths.shape:
            raise ConfigValidationError("box center and halfwidths must have the same length")

    @classmethod
    def _build(cls, dim: int, params: BoxParams) -> "Box":
        if len(params.halfwidths) != dim:
            raise ConfigValidationError(f"box needs {dim} halfwidths, got {len(params.halfwidths)}")
        return cls(params.halfwidths, params.center)

    @property
    def spec(self) -> BodySpec:
        params: dict[str, Any] = {"halfwidths": self.halfwidths.tolist()}
        if np.any(self.center):
            params["center"] = self.center.tolist()
        return BodySpec(kind=self.kind, dim=self.dim, params=params)

    @property
    def is_symmetric(self) -> bool:
        return not np.any(self.center)

    @property
    def lower(self) -> np.ndarray:
        return self.center - self.halfwidths

    @property
    def upper(self) -> np.ndarray:
        return self.center + self.halfwidths

    def contains_many(self, ys: np.ndarray, delta: float) -> np.ndarray:
        ys = self._rows(ys)
        gap = ys - np.clip(ys, self.lower, self.upper)
        return np.linalg.norm(gap, axis=1) <= delta

    def _linear_minimize(self, c: np.ndarray) -> np.ndarray:
        return self.center - self.halfwidths * np.sign(c)

    def support_many(self, vs: np.ndarray) -> np.ndarray:
        vs = self._rows(vs)
        return vs @ self.center + np.abs(vs) @ self.halfwidths

    def _gauge_closed_form(self, vs: np.ndarray) -> np.ndarray:
        return np.max(np.abs(vs) / self.halfwidths, axis=1)

    def _separate(self, y: np.ndarray, delta: float) -> Separation:
        gap = y - np.clip(y, self.lower, self.upper)
        if np.linalg.norm(gap) <= delta:
            return Separation.certified()
        return Separation.cut(-gap)

    def _radii(self) -> tuple[float, float]:
        return float(self.halfwidths.min()), float(np.linalg.norm(self.halfwidths))

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lower, self.upper

    def interior_point(self) -> np.ndarray:
        return self.center.copy()

    def extreme_points(self) -> np.ndarray:
        return _one_hot_vertices(self.lower, self.upper)

    def project(self, y: np.ndarray) -> np.ndarray:
        return np.clip(y, self.lower, self.upper)

    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        eye = np.eye(self.dim)
        return np.vstack([eye, -eye]), np.concatenate([self.upper, -self.lower])


class Ellipsoid(ConvexBody):
    """``{x : x^T A^{-1} x <= 1}``; semi-axes are the square roots of eig(A)."""

    kind = BodyKind.ELLIPSOID
    params_model = EllipsoidParams

    def __init__(self, shape: Any):
        shape = np.asarray(shape, dtype=float)
        if shape.ndim != 2 or shape.shape[0] != shape.shape[1]:
            raise ConfigValidationError(f"ellipsoid shape must be square, got {shape.shape}")
        if not np.allclose(shape, shape.T, atol=_SYMMETRY_TOL):
            raise ConfigValidationError("ellipsoid shape matrix must be symmetric")
        super().__init__(shape.shape[0])
        self.shape = 0.5 * (shape + shape.T)
        self.eigenvalues, self.eigenvectors = np.linalg.eigh(self.shape)
        if self.eigenvalues[0] <= 0:
            raise DegenerateBodyError("ellipsoid shape matrix must be positive definite")
        self.inverse = np.linalg.inv(self.shape)

    @classmethod
    def _build(cls, dim: int, params: EllipsoidParams) -> "Ellipsoid":
        body = cls(params.shape)
        if body.dim != dim:
            raise ConfigValidationError(f"ellipsoid shape is {body.dim}x{body.dim}, dim says {dim}")
        return body

    @classmethod
    def axis_aligned(cls, semi_axes: Any) -> "Ellipsoid":
        return cls(np.diag(np.asarray(semi_axes, dtype=float) ** 2))

    @property
    def spec(self) -> BodySpec:
        return BodySpec(kind=self.kind, dim=self.dim, params={"shape": self.shape.tolist()})

    def _quad(self, vs: np.ndarray, matrix: np.ndarray) -> np.ndarray:
        return np.sqrt(np.maximum(np.einsum("ij,jk,ik->i", vs, matrix, vs), 0.0))

    def contains_many(self, ys: np.ndarray, delta: float) -> np.ndarray:
        return self._gauge_shell(self._quad(self._rows(ys), self.inverse), delta)

    def _linear_minimize(self, c: np.ndarray) -> np.ndarray:
        ac = self.shape @ c
        return -ac / math.sqrt(float(c @ ac))

    def support_many(self, vs: np.ndarray) -> np.ndarray:
        return self._quad(self._rows(vs), self.shape)

    def _gauge_closed_form(self, vs: np.ndarray) -> np.ndarray:
        return self._quad(vs, self.inverse)

    def _separate(self, y: np.ndarray, delta: float) -> Separation:
        if self.contains_many(y[None, :], delta)[0]:
            return Separation.certified()
        return Separation.cut(-(self.inverse @ y))

    def _radii(self) -> tuple[float, float]:
        return math.sqrt(self.eigenvalues[0]), math.sqrt(self.eigenvalues[-1])

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        half = np.sqrt(np.diag(self.shape))
        return -half, half

    def extreme_points(self) -> np.ndarray:
        axes = (self.eigenvectors * np.sqrt(self.eigenvalues)).T
        return np.stack([s * row for row in axes for s in (1.0, -1.0)])


class _Polytope(ConvexBody):
    """Shared facet machinery: unit normals ``a_k`` and offsets ``b_k > 0``."""

    normals: np.ndarray
    offsets: np.ndarray

    def _facet_ratios(self, ys: np.ndarray) -> np.ndarray:
        # the facet set is closed under negation, so max |a.y|/b equals max a.y/b
        return np.max(np.abs(ys @ self.normals.T) / self.offsets, axis=1)

    def contains_many(self, ys: np.ndarray, delta: float) -> np.ndarray:
        return self._gauge_shell(self._facet_ratios(self._rows(ys)), delta)

    def _separate(self, y: np.ndarray, delta: float) -> Separation:
        ratios = (self.normals @ y) / self.offsets
        k = int(np.argmax(ratios))
        if ratios[k] <= 1.0 + delta / self.radii.R_outer:
            return Separation.certified()
        return Separation.cut(-self.normals[k])

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        verts = self.vertices
        return verts.min(axis=0), verts.max(axis=0)

    def extreme_points(self) -> np.ndarray:
        return self.vertices

    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        return self.normals, self.offsets

    def _radii(self) -> tuple[float, float]:
        return float(self.offsets.min()), float(np.linalg.norm(self.vertices, axis=1).max())


def _check_negation_closed(rows: np.ndarray, what: str) -> None:
    scale = max(1.0, float(np.abs(rows).max()))
    for row in rows:
        if np.min(np.linalg.norm(rows + row, axis=1)) > _SYMMETRY_TOL * scale:
            raise SymmetryError(f"{what} not closed under negation: missing {(-row).tolist()}")


class PolytopeV(_Polytope):
    """Convex hull of a vertex list closed under negation."""

    kind = BodyKind.POLYTOPE_V
    params_model = VertexParams

    def __init__(self, vertices: Any):
        vertices = np.asarray(vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] < 2:
            raise ConfigValidationError("polytope-v needs a vertex list in dimension >= 2")
        super().__init__(vertices.shape[1])
        _check_negation_closed(vertices, "vertex list")
        self.vertices = vertices
        try:
            hull = ConvexHull(vertices)
        except QhullError as e:
            raise DegenerateBodyError(f"polytope-v is not full-dimensional: {e}") from e
        equations = np.unique(np.round(hull.equations, 14), axis=0)
        self.normals = equations[:, :-1]
        self.offsets = -equations[:, -1]

    @classmethod
    def _build(cls, dim: int, params: VertexParams) -> "PolytopeV":
        body = cls(params.vertices)
        if body.dim != dim:
            raise ConfigValidationError(f"vertices have dimension {body.dim}, dim says {dim}")
        return body

    @property
    def spec(self) -> BodySpec:
        return BodySpec(kind=self.kind, dim=self.dim, params={"vertices": self.vertices.tolist()})

    def _linear_minimize(self, c: np.ndarray) -> np.ndarray:
        return self.vertices[int(np.argmin(self.vertices @ c))].copy()

    def support_many(self, vs: np.ndarray) -> np.ndarray:
        return np.max(self._rows(vs) @ self.vertices.T, axis=1)


class PolytopeH(_Polytope):
    """``{x : a_k . x <= b_k}`` with the halfspace list closed under negation."""

    kind = BodyKind.POLYTOPE_H
    params_model = HalfspaceParams

    def __init__(self, normals: Any, offsets: Any):
        normals = np.asarray(normals, dtype=float)
        offsets = np.asarray(offsets, dtype=float)
        if normals.ndim != 2 or normals.shape[1] < 2:
            raise ConfigValidationError("polytope-h needs normals in dimension >= 2")
        if len(offsets) != len(normals):
            raise ConfigValidationError("polytope-h needs one offset per normal")
        if np.any(offsets <= 0):
            raise ConfigValidationError("polytope-h offsets must be positive (origin interior)")
        super().__init__(normals.shape[1])
        lengths = np.linalg.norm(normals, axis=1)
        self.normals = normals / lengths[:, None]
        self.offsets = offsets / lengths
        self._check_pairs()
        try:
            meet = HalfspaceIntersection(
                np.hstack([self.normals, -self.offsets[:, None]]), np.zeros(self.dim)
            )
        except QhullError as e:
            raise DegenerateBodyError(f"polytope-h is unbounded or degenerate: {e}") from e
        self.vertices = meet.intersections
        if not np.all(np.isfinite(self.vertices)):
            raise DegenerateBodyError("polytope-h is unbounded")

    def _check_pairs(self) -> None:
        for a, b in zip(self.normals, self.offsets):
            gaps = np.linalg.norm(self.normals + a, axis=1) + np.abs(self.offsets - b)
            if gaps.min() > _SYMMETRY_TOL * max(1.0, b):
                raise SymmetryError(f"halfspace list not closed under negation: missing {(-a).tolist()}")

    @classmethod
    def _build(cls, dim: int, params: HalfspaceParams) -> "PolytopeH":
        body = cls(params.normals, params.offsets)
        if body.dim != dim:
            raise ConfigValidationError(f"normals have dimension {body.dim}, dim says {dim}")
        return body

    @property
    def spec(self) -> BodySpec:
        return BodySpec(
            kind=self.kind,
            dim=self.dim,
            params={"normals": self.normals.tolist(), "offsets": self.offsets.tolist()},
        )

    def _linear_minimize(self, c: np.ndarray) -> np.ndarray:
        solution = solve_lp(c, self.normals, self.offsets)
        return solution.x

    def _gauge_closed_form(self, vs: np.ndarray) -> np.ndarray:
        return self._facet_ratios(vs)


class Simplex(ConvexBody):
    """Probability simplex; non-symmetric, accepted as an FTRL action set only."""

    kind = BodyKind.SIMPLEX
    params_model = SimplexParams

    @classmethod
    def _build(cls, dim: int, params: SimplexParams) -> "Simplex":
        return cls(dim)

    @property
    def spec(self) -> BodySpec:
        return BodySpec(kind=self.kind, dim=self.dim, params={})

    @property
    def is_symmetric(self) -> bool:
        return False

    def contains_many(self, ys: np.ndarray, delta: float) -> np.ndarray:
        ys = self._rows(ys)
        slack = delta / math.sqrt(self.dim)
        return np.all(ys >= -slack, axis=1) & (np.abs(ys.sum(axis=1) - 1.0) <= delta)

    def _linear_minimize(self, c: np.ndarray) -> np.ndarray:
        y = np.zeros(self.dim)
        y[int(np.argmin(c))] = 1.0
        return y

    def support_many(self, vs: np.ndarray) -> np.ndarray:
        return np.max(self._rows(vs), axis=1)

    def _separate(self, y: np.ndarray, delta: float) -> Separation:
        k = int(np.argmin(y))
        if y[k] < -delta / math.sqrt(self.dim):
            return Separation.cut(np.eye(self.dim)[k])
        total = float(y.sum())
        if total > 1.0 + delta:
            return Separation.cut(-np.ones(self.dim))
        if total < 1.0 - delta:
            return Separation.cut(np.ones(self.dim))
        return Separation.certified()

    def _radii(self) -> tuple[float, float]:  # pragma: no cover - guarded by _require_symmetric
        raise SymmetryError("simplex has no centred radii")

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return np.zeros(self.dim), np.ones(self.dim)

    def interior_point(self) -> np.ndarray:
        return np.full(self.dim, 1.0 / self.dim)

    def extreme_points(self) -> np.ndarray:
        return np.eye(self.dim)

    def project(self, y: np.ndarray) -> np.ndarray:
        # sort-based Euclidean projection onto the simplex
        u = np.sort(y)[::-1]
        css = np.cumsum(u) - 1.0
        idx = np.arange(1, self.dim + 1)
        rho = int(np.nonzero(u - css / idx > 0)[0][-1])
        theta = css[rho] / (rho + 1.0)
        return np.maximum(y - theta, 0.0)

    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        ones = np.ones((1, self.dim))
        return np.vstack([-np.eye(self.dim), ones, -ones]), np.concatenate(
            [np.zeros(self.dim), [1.0, -1.0]]
        )


def _one_hot_vertices(lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Vertices with exactly one coordinate flipped away from each corner, deduplicated."""
    dim = len(lower)
    rows = []
    for base, other in ((lower, upper), (upper, lower)):
        for k in range(dim):
            row = base.copy()
            row[k] = other[k]
            rows.append(row)
    unique: list[np.ndarray] = []
    for row in rows:
        if not any(np.array_equal(row, seen) for seen in unique):
            unique.append(row)
    return np.stack(unique)


# ==================== Factories ====================

_KINDS: dict[BodyKind, type[ConvexBody]] = {
    cls.kind: cls
    for cls in (EuclideanBall, LpBall, Box, Ellipsoid, PolytopeV, PolytopeH, Simplex)
}


def build_body(spec: BodySpec | dict[str, Any]) -> ConvexBody:
    if not isinstance(spec, BodySpec):
        try:
            spec = BodySpec.model_validate(spec)
        except ValidationError as e:
            raise ConfigValidationError(_validation_messages(e, "body")) from e
    body = _KINDS[spec.kind].from_spec(spec)
    logger.debug(f"Built {spec.kind.value} body in dimension {spec.dim}")
    return body


def load_body(path: str | Path) -> ConvexBody:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigValidationError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e
    return build_body(payload)


def require_symmetric(body: ConvexBody, role: str) -> ConvexBody:
    if not body.is_symmetric:
        raise SymmetryError(f"{role} must be centrally symmetric for synthesis, got {body.kind.value}")
    return body


def euclidean_ball(dim: int, radius: float = 1.0) -> EuclideanBall:
    return EuclideanBall(dim, radius)


def lp_ball(dim: int, p: float, radius: float = 1.0) -> LpBall:
    return LpBall(dim, p, radius)


def box(halfwidths: Any, center: Any | None = None) -> Box:
    return Box(halfwidths, center)


def unit_cube(dim: int) -> Box:
    """[0, 1]^d, the loss set of the experts instance"""
    return Box(np.full(dim, 0.5), np.full(dim, 0.5))
