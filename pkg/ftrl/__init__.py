from .models import FtrlState, InnerSolveConfig, InnerSolveResult, LossSource, RegretTrace
from .kelley import KelleyMinimizer, inner_minimize
from .learner import ftrl_step, observe_loss, regularizer_weight, run_ftrl
from .regret import cumulative_regret

__all__ = [
    "FtrlState",
    "InnerSolveConfig",
    "InnerSolveResult",
    "KelleyMinimizer",
    "LossSource",
    "RegretTrace",
    "cumulative_regret",
    "ftrl_step",
    "inner_minimize",
    "observe_loss",
    "regularizer_weight",
    "run_ftrl",
]
