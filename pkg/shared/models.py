from enum import Enum, IntEnum


class BodyKind(str, Enum):
    EUCLIDEAN_BALL = "euclidean-ball"
    LP_BALL = "lp-ball"
    BOX = "box"
    ELLIPSOID = "ellipsoid"
    POLYTOPE_V = "polytope-v"
    POLYTOPE_H = "polytope-h"
    SIMPLEX = "simplex"


class CutFamily(str, Enum):
    LOCALITY = "locality"
    GRAD_BOUND = "grad-bound"
    VALUE_BOUND = "value-bound"
    OBJECTIVE_LINK = "objective-link"
    PSD_UPPER = "psd-upper"
    STRONG_CONVEXITY = "strong-convexity"


class LocalityMargin(str, Enum):
    PROGRAM = "program"        # 17L/96, the expanded program form
    CONDITION = "condition"    # 15L/96 against the -L/6 piece, i.e. L/96


class SolveStatus(str, Enum):
    CERTIFIED = "certified"
    MAX_ROUNDS = "max-rounds"
    STALLED = "stalled"


class AdversaryKind(str, Enum):
    IID_EXTREME = "iid-extreme"
    SIGN_ADAPTIVE = "sign-adaptive"
    FOLLOW_LEADER_TRAP = "follow-leader-trap"
    ZERO = "zero"


class BaselineKind(str, Enum):
    QUADRATIC = "quadratic"
    ENTROPY = "entropy"


class Weighting(str, Enum):
    DIRECT = "direct"      # eta*g(x) + <x, cum_loss>
    INVERSE = "inverse"    # g(x)/eta + <x, cum_loss>, i.e. DIRECT with eta replaced by 1/eta


class RunStatus(str, Enum):
    COMPLETED = "completed"
    FAILED = "failed"


class ExitCode(IntEnum):
    OK = 0
    INFEASIBLE = 1
    INTERNAL = 2
