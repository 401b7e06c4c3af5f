from .problem import (
    CaseKind, RadialChart, PayoffKind, AmbiguityParams, BasePayoff,
    DigitalAsymmetric, EvenKink, PeriodicCosine, Straddle, IdentityRadial,
    UserTable, Payoff, evaluate_payoff, RunOptions, ProblemSpec,
    LINEAR_KINDS, RADIAL_KINDS,
)
from .solution import (
    LinearRegime, RadialRegime, GeneratorKind, GeneratorDescriptor,
    worst_case_theta, encode_extended, Solution, StraddleSolution,
    piecewise_value,
)
from .report import (
    SolutionSummary, McCheck, PdeCheck, SweepRow, SweepBlock, RunInfo, RunReport,
)

__all__ = [
    "CaseKind", "RadialChart", "PayoffKind", "AmbiguityParams", "BasePayoff",
    "DigitalAsymmetric", "EvenKink", "PeriodicCosine", "Straddle",
    "IdentityRadial", "UserTable", "Payoff", "evaluate_payoff", "RunOptions",
    "ProblemSpec", "LINEAR_KINDS", "RADIAL_KINDS",
    "LinearRegime", "RadialRegime", "GeneratorKind", "GeneratorDescriptor",
    "worst_case_theta", "encode_extended", "Solution", "StraddleSolution",
    "piecewise_value",
    "SolutionSummary", "McCheck", "PdeCheck", "SweepRow", "SweepBlock",
    "RunInfo", "RunReport",
]
