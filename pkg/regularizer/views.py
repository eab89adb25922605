from typing import Protocol, runtime_checkable

import numpy as np


@runtime_checkable
class RegularizerView(Protocol):
    """Anything FTRL can minimize against: a convex value with a subgradient."""

    dim: int
    globally_defined: bool

    def value(self, x: np.ndarray) -> float: ...

    def subgradient(self, x: np.ndarray) -> np.ndarray: ...


def closed_form_argmin(view: object, linear: np.ndarray, weight: float, action_set: object) -> np.ndarray | None:
    """argmin of weight*g(x) + <x, linear> over the action set, if the view knows one"""
    solver = getattr(view, "argmin_linear", None)
    if solver is None:
        return None
    return solver(linear, weight, action_set)
