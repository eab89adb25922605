from .convexity import ConvexityReport, strong_convexity_sampled
from .derivatives import DerivativeAuditReport, DerivativeBounds, derivative_bound_audit, finite_diff
from .sampling import sample_directions, sample_in_body
from .smoothing import (
    McEstimate,
    SmoothedFunction,
    SmoothingProbe,
    SmoothingReport,
    gaussian_smooth_mc,
    smoothed_derivative_bounds,
    smoothing_preserves_convexity_check,
)

__all__ = [
    "ConvexityReport",
    "DerivativeAuditReport",
    "DerivativeBounds",
    "McEstimate",
    "SmoothedFunction",
    "SmoothingProbe",
    "SmoothingReport",
    "derivative_bound_audit",
    "finite_diff",
    "gaussian_smooth_mc",
    "sample_directions",
    "sample_in_body",
    "smoothed_derivative_bounds",
    "smoothing_preserves_convexity_check",
    "strong_convexity_sampled",
]
