from __future__ import annotations

from cli.config import CheckBlock
from cli.report import write_report
from convex_sets.bodies import build_body
from regularizer.serialization import deserialize
from shared.core import logger
from shared.errors import ConfigValidationError
from shared.models import ExitCode
from verify import derivative_bound_audit, strong_convexity_sampled


def handle(block: CheckBlock, digest: str) -> ExitCode:
    g = deserialize(block.regularizer.read_bytes())
    loss_spec = block.loss_set or g.loss_body
    if loss_spec is None:
        raise ConfigValidationError("check needs a loss set: the regularizer file does not name one")
    loss_set = build_body(loss_spec)
    # without an explicit action set, sample inside the loss set
    action_set = build_body(block.action_set) if block.action_set is not None else loss_set
    alpha = block.alpha or g.alpha

    convexity = strong_convexity_sampled(
        g, action_set, loss_set, alpha, block.samples, block.seed, inner_fraction=block.inner_fraction
    )
    audit = derivative_bound_audit(g, action_set, n=min(block.samples, 200), seed=block.seed)
    if not convexity.passed:
        logger.warning(f"Sampled strong convexity fails at alpha={alpha:g}: min slack {convexity.min_slack:.3g}")

    write_report(
        block.report,
        {
            "config_digest": digest,
            "regularizer_digest": g.provenance.get("config_digest", ""),
            "pieces": len(g),
            "alpha": alpha,
            "samples": block.samples,
            "seed": block.seed,
            "inner_fraction": block.inner_fraction,
            "passed": convexity.passed,
            "first_order_min_slack": convexity.first_order_min_slack,
            "second_order_min_slack": convexity.second_order_min_slack,
            "max_directional_gradient": audit.max_gradient,
            "max_hessian_norm": audit.max_hessian,
            "max_hessian_lipschitz_ratio": audit.max_hessian_lipschitz,
        },
    )
    return ExitCode.OK
