"""Exact expectation bounds over divergence balls on a finite simplex.

Given a probability mass function p over n outcomes, a payoff f, and a
radius, this package computes the minimum (and, by conjugacy, maximum) of
the expectation of f over every distribution within total-variation or
chi-squared divergence distance of p, in closed form and together with an
attaining distribution, plus a brute-force grid oracle that certifies the
closed forms at small n.

>>> from divball import validate, tv_lower_expectation
>>> p, f = validate([0.2, 0.3, 0.5], [1.0, 2.0, 3.0])
>>> tv_lower_expectation(p, f, 0.4).value
1.5
"""

from .chi2 import (
    CriticalDeltas,
    chi2_active_index,
    chi2_divergence,
    chi2_lower_expectation,
    chi2_minimizer,
    chi2_three_point,
    chi2_two_point,
    chi2_upper_expectation,
    critical_deltas,
)
from .cli import RadiusQuery, robustness_radius
from .core import (
    BallFamily,
    BallSpec,
    BoundResult,
    Objective,
    Pmf,
    SortedProblem,
    expectation,
    sort_and_prefix,
    suffix_masses,
    validate,
)
from .errors import (
    DivballError,
    EmptyFeasibleError,
    EmptySupportError,
    LengthMismatchError,
    NegativeDeltaError,
    NegativeWeightError,
    NonFiniteError,
    SumNotOneError,
    TiedBottomError,
    TooLargeError,
    UnreachableError,
    WrongArityError,
    ZeroMassForbiddenError,
)
from .oracle import (
    OracleReport,
    enumerate_compositions,
    naive_chi2_divergence,
    naive_expectation,
    naive_tv_distance,
    oracle_check_verdict,
    oracle_lower_expectation,
)
from .tv import (
    tv_distance,
    tv_lower_expectation,
    tv_threshold_index,
    tv_upper_expectation,
)

__version__ = "0.1.0"

__all__ = [
    "BallFamily",
    "BallSpec",
    "BoundResult",
    "CriticalDeltas",
    "DivballError",
    "EmptyFeasibleError",
    "EmptySupportError",
    "LengthMismatchError",
    "NegativeDeltaError",
    "NegativeWeightError",
    "NonFiniteError",
    "Objective",
    "OracleReport",
    "Pmf",
    "RadiusQuery",
    "SortedProblem",
    "SumNotOneError",
    "TiedBottomError",
    "TooLargeError",
    "UnreachableError",
    "WrongArityError",
    "ZeroMassForbiddenError",
    "chi2_active_index",
    "chi2_divergence",
    "chi2_lower_expectation",
    "chi2_minimizer",
    "chi2_three_point",
    "chi2_two_point",
    "chi2_upper_expectation",
    "critical_deltas",
    "enumerate_compositions",
    "expectation",
    "naive_chi2_divergence",
    "naive_expectation",
    "naive_tv_distance",
    "oracle_check_verdict",
    "oracle_lower_expectation",
    "robustness_radius",
    "sort_and_prefix",
    "suffix_masses",
    "tv_distance",
    "tv_lower_expectation",
    "tv_threshold_index",
    "tv_upper_expectation",
    "validate",
]
