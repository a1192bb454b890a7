"""Closed-form worst-case expectation over a total-variation ball.

With outcomes in ascending objective order the optimal move is greedy: drain
mass from the highest-objective outcomes (top down, up to a total of delta)
and pile all of it onto the single lowest-objective outcome.  The draining
stops at the smallest support size r whose tail mass is already covered by
delta; r = 1 means the whole unit mass ends up on the bottom outcome.
"""

import numpy as np

from .core import (
    BRANCH_DEGENERATE,
    BRANCH_INTERIOR,
    BoundResult,
    Objective,
    Pmf,
    SortedProblem,
    sort_and_prefix,
    suffix_masses,
)
from .errors import LengthMismatchError, NegativeDeltaError


def tv_distance(q: Pmf, p: Pmf) -> float:
    """Total variation distance: half the 1-norm of the weight difference."""
    if q.n != p.n:
        raise LengthMismatchError(f"{q.n} vs {p.n} outcomes")
    return 0.5 * float(np.abs(q.weights - p.weights).sum())


def _threshold(tails: np.ndarray, delta: float) -> int:
    # Smallest 1-based r with delta >= mass after position r; always exists
    # because the empty tail is exactly 0.
    for j in range(len(tails)):
        if delta >= tails[j]:
            return j + 1
    raise AssertionError("unreachable: the empty tail sums to 0")


def tv_threshold_index(sp: SortedProblem, delta: float) -> int:
    """Smallest support size r whose tail mass (after r) is at most delta."""
    if delta < 0.0:
        raise NegativeDeltaError(f"delta must be >= 0, got {delta}")
    return _threshold(suffix_masses(sp.p_sorted), delta)


def tv_lower_expectation(p: Pmf, f: Objective, delta: float) -> BoundResult:
    """Exact minimum of the expectation over the radius-``delta`` TV ball.

    Radii above 1 are clamped to 1: the ball is already the whole simplex.
    The attaining minimizer is returned in original outcome order; it raises
    only the lowest-objective coordinate, keeps interior coordinates, drains
    the coordinate at the threshold index and zeroes everything above it.
    """
    if delta < 0.0:
        raise NegativeDeltaError(f"delta must be >= 0, got {delta}")
    d = min(float(delta), 1.0)
    sp = sort_and_prefix(p, f)
    tails = suffix_masses(sp.p_sorted)
    r = _threshold(tails, d)

    if r == 1:
        q_sorted = np.zeros(sp.n)
        q_sorted[0] = 1.0
        value = float(sp.f_sorted[0])
        branch = BRANCH_DEGENERATE
    else:
        q_sorted = sp.p_sorted.copy()
        q_sorted[0] = sp.p_sorted[0] + d
        # tails[r-2] is the mass from position r onward (1-based); the
        # threshold guarantees d < tails[r-2], so this stays positive.
        q_sorted[r - 1] = tails[r - 2] - d
        q_sorted[r:] = 0.0
        value = float(np.dot(q_sorted, sp.f_sorted))
        branch = BRANCH_INTERIOR

    minimizer = Pmf(sp.to_original_order(q_sorted), labels=p.labels)
    return BoundResult(value=value, minimizer=minimizer, active_index=r, branch=branch)


def tv_upper_expectation(p: Pmf, f: Objective, delta: float) -> BoundResult:
    """Exact maximum over the TV ball, by conjugacy with the negated payoff.

    The returned distribution is the attaining maximizer; ``active_index``
    and ``branch`` describe the conjugate minimization.
    """
    res = tv_lower_expectation(p, f.negated(), delta)
    return BoundResult(
        value=-res.value,
        minimizer=res.minimizer,
        active_index=res.active_index,
        branch=res.branch,
    )
