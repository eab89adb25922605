"""Thin wrapper over scipy's HiGHS linear programming."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from shared.config import settings
from shared.errors import NumericalError


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    x: np.ndarray | None
    objective: float | None
    message: str

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


_STATUS = {0: LpStatus.OPTIMAL, 2: LpStatus.INFEASIBLE, 3: LpStatus.UNBOUNDED}


def solve_lp(
    c: np.ndarray,
    a_ub: np.ndarray | sparse.spmatrix | None = None,
    b_ub: np.ndarray | None = None,
    bounds: list[tuple[float | None, float | None]] | None = None,
    a_eq: np.ndarray | None = None,
    b_eq: np.ndarray | None = None,
) -> LpSolution:
    """Minimize ``c @ x`` subject to ``a_ub @ x <= b_ub`` and ``a_eq @ x == b_eq``.

    Variables are free unless ``bounds`` says otherwise (scipy's default is
    ``x >= 0``, which is never what callers here want).
    """
    n = len(c)
    if bounds is None:
        bounds = [(None, None)] * n
    result = linprog(
        c,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=bounds,
        method=settings.lp_method,
    )
    status = _STATUS.get(result.status)
    if status is None:
        raise NumericalError(f"LP solver failed (status {result.status}): {result.message}")
    if status is LpStatus.OPTIMAL:
        return LpSolution(status, np.asarray(result.x, dtype=float), float(result.fun), result.message)
    return LpSolution(status, None, None, result.message)
