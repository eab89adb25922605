from .assemble import LocalityAudit, assemble_regularizer, locality_audit, quadratic_witness, validate_instance
from .calibration import calibrate_constants, theory_schedule
from .cuts import (
    PsdVerdict,
    StrongConvexitySeparator,
    StrongConvexityVerdict,
    locality_constraints,
    psd_upper_cut,
    strong_convexity_cut,
)
from .grid import coverage_radius, discretize_action_set
from .metrics import SolverMetrics, solver_metrics_factory
from .models import (
    ConstraintCut,
    DiscretizationGrid,
    ProgramInstance,
    ProgramSolution,
    SolveReport,
    SynthesisConfig,
    ValidationReport,
)
from .solver import solve_program, solve_with_doubling

__all__ = [
    "ConstraintCut",
    "DiscretizationGrid",
    "LocalityAudit",
    "ProgramInstance",
    "ProgramSolution",
    "PsdVerdict",
    "SolveReport",
    "SolverMetrics",
    "StrongConvexitySeparator",
    "StrongConvexityVerdict",
    "SynthesisConfig",
    "ValidationReport",
    "assemble_regularizer",
    "calibrate_constants",
    "coverage_radius",
    "discretize_action_set",
    "locality_audit",
    "locality_constraints",
    "psd_upper_cut",
    "quadratic_witness",
    "solve_program",
    "solve_with_doubling",
    "strong_convexity_cut",
    "theory_schedule",
    "validate_instance",
]
