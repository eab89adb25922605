from __future__ import annotations

import numpy as np

from convex_sets.bodies import ConvexBody
from ftrl.kelley import KelleyMinimizer
from ftrl.models import FtrlState, InnerSolveConfig, InnerSolveResult, LossSource, RegretTrace
from ftrl.regret import cumulative_regret
from regularizer.views import RegularizerView, closed_form_argmin
from shared.config import settings
from shared.core import logger
from shared.errors import InputError
from shared.models import Weighting


def regularizer_weight(state: FtrlState, cfg: InnerSolveConfig) -> float:
    """Coefficient of g in G_t(x) = w g(x) + <x, cum_loss>."""
    if cfg.weighting is Weighting.DIRECT:
        return state.eta
    return 1.0 / state.eta


def _range_proxy(view: RegularizerView, action_set: ConvexBody, weight: float, cum_loss: np.ndarray) -> float:
    # spread of G_t over the action set, from the value bound of g and |<x, c>| <= h(c)
    value_range = getattr(view, "value_range", lambda: None)()
    g_spread = value_range if value_range is not None else 1.0
    lower, upper = action_set.bounding_box()
    radius = float(np.linalg.norm(np.maximum(np.abs(lower), np.abs(upper))))
    return weight * g_spread + radius * float(np.linalg.norm(cum_loss))


def ftrl_step(
    state: FtrlState,
    g: RegularizerView,
    action_set: ConvexBody,
    cfg: InnerSolveConfig | None = None,
    minimizer: KelleyMinimizer | None = None,
) -> InnerSolveResult:
    """Play argmin over the action set of w g(x) + <x, cum_loss>."""
    cfg = cfg or InnerSolveConfig()
    if state.finished:
        raise InputError(f"horizon {state.horizon} already reached")
    if state.dim != action_set.dim or g.dim != action_set.dim:
        raise InputError(
            f"dimension mismatch: state {state.dim}, regularizer {g.dim}, action set {action_set.dim}"
        )

    weight = regularizer_weight(state, cfg)
    if cfg.closed_form:
        x = closed_form_argmin(g, state.cum_loss, weight, action_set)
        if x is not None:
            value = weight * float(g.value(x)) + float(state.cum_loss @ x)
            return InnerSolveResult(x, value, value, iterations=0, certified=True, closed_form=True)

    minimizer = minimizer or KelleyMinimizer(g, action_set, cfg)
    result = minimizer.minimize(weight, state.cum_loss, _range_proxy(g, action_set, weight, state.cum_loss))
    if not result.certified:
        logger.warning(f"Round {state.t + 1}: inner solve not certified, playing best iterate (gap {result.gap:.3g})")
    return result


def observe_loss(state: FtrlState, loss: np.ndarray, loss_set: ConvexBody) -> FtrlState:
    loss = np.asarray(loss, dtype=float)
    if loss.shape != (state.dim,):
        raise InputError(f"loss has shape {loss.shape}, expected ({state.dim},)")
    violated = not loss_set.membership(loss, settings.membership_tol)
    if violated:
        logger.warning(f"Round {state.t + 1}: loss {loss.tolist()} is outside the loss set")
    return state.advance(loss, violated)


def run_ftrl(
    g: RegularizerView,
    action_set: ConvexBody,
    loss_set: ConvexBody,
    adversary: LossSource,
    horizon: int,
    cfg: InnerSolveConfig | None = None,
    *,
    seed: int = 0,
    config_digest: str = "",
) -> RegretTrace:
    """Play ``horizon`` rounds and record the trace with its running regret."""
    if horizon < 1:
        raise InputError(f"horizon must be at least 1, got {horizon}")
    cfg = cfg or InnerSolveConfig()
    state = FtrlState.initial(action_set.dim, horizon, cfg.eta)
    minimizer = None if cfg.closed_form and hasattr(g, "argmin_linear") else KelleyMinimizer(g, action_set, cfg)
    adversary.reset()

    actions = np.empty((horizon, action_set.dim))
    losses = np.empty((horizon, action_set.dim))
    gaps = np.empty(horizon)
    uncertified = 0
    for t in range(horizon):
        step = ftrl_step(state, g, action_set, cfg, minimizer)
        loss = np.asarray(adversary.next_loss(t, step.x), dtype=float)
        state = observe_loss(state, loss, loss_set)
        actions[t], losses[t], gaps[t] = step.x, loss, step.gap
        uncertified += int(not step.certified)

    trace = RegretTrace(
        actions=actions,
        losses=losses,
        cumulative_regret=cumulative_regret(actions, losses, action_set),
        inner_gaps=gaps,
        config_digest=config_digest,
        seed=seed,
        uncertified_steps=uncertified,
        contract_violations=state.contract_violations,
        meta={"eta": state.eta, "weighting": cfg.weighting.value, "regularizer_weight": regularizer_weight(state, cfg)},
    )
    logger.debug(f"FTRL run finished: T={horizon}, regret={trace.final_regret:.4g}")
    return trace
