"""Core simplex types and the objective-ascending preprocessing.

Both ball solvers start the same way: reorder the outcomes so the objective
is non-decreasing and accumulate prefix statistics (mass, mean, variance) in
a single pass.  This module owns those shared types, input validation, and
the expectation operation.

All values are immutable after construction and every function is pure, so
instances are safe to share across threads.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    DivballError,
    EmptySupportError,
    LengthMismatchError,
    NegativeDeltaError,
    NegativeWeightError,
    NonFiniteError,
    SumNotOneError,
    ZeroMassForbiddenError,
)

SUM_TOLERANCE = 1e-9

BRANCH_INTERIOR = "interior"
BRANCH_PLATEAU = "plateau"
BRANCH_DEGENERATE = "degenerate"
BRANCHES = (BRANCH_INTERIOR, BRANCH_PLATEAU, BRANCH_DEGENERATE)


class BallFamily(str, enum.Enum):
    """Which divergence defines the ball around the center pmf."""

    TV = "tv"
    CHI2 = "chi2"


def _clean_vector(values, what: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1:
        raise DivballError(f"{what} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise EmptySupportError(f"{what} must have at least one entry")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{what} contains NaN or infinity")
    return arr


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability mass function over a finite outcome set.

    Weights must be nonnegative and sum to 1 within ``SUM_TOLERANCE``; they
    are then renormalized exactly (divided by their float sum) so downstream
    identities hold to machine precision.  Optional labels name the outcomes
    and must be distinct.
    """

    weights: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        w = _clean_vector(self.weights, "weights")
        if np.any(w < 0.0):
            raise NegativeWeightError("weights must be nonnegative")
        total = float(w.sum())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise SumNotOneError(
                f"weights sum to {total!r}, expected 1 within {SUM_TOLERANCE}"
            )
        w = w / total
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != w.size:
                raise LengthMismatchError(
                    f"{len(labels)} labels for {w.size} outcomes"
                )
            if not all(isinstance(lab, str) for lab in labels):
                raise DivballError("labels must be strings")
            if len(set(labels)) != len(labels):
                raise DivballError("labels must be distinct")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.weights.size

    @classmethod
    def _exact(cls, weights: np.ndarray) -> "Pmf":
        """Internal: wrap weights valid by construction, skipping the
        renormalizing division so exact grid multiples stay bit-exact."""
        w = np.asarray(weights, dtype=float).copy()
        assert w.ndim == 1 and w.size > 0 and np.all(w >= 0.0)
        assert abs(float(w.sum()) - 1.0) <= SUM_TOLERANCE
        w.flags.writeable = False
        self = object.__new__(cls)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "labels", None)
        return self


@dataclass(frozen=True, eq=False)
class Objective:
    """Real-valued payoff on the same outcome set as the ball center."""

    values: np.ndarray

    def __post_init__(self):
        v = _clean_vector(self.values, "objective values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    def negated(self) -> "Objective":
        """The pointwise negation; used for upper bounds via conjugacy."""
        return Objective(-self.values)


@dataclass(frozen=True)
class BallSpec:
    """A divergence ball description: family plus radius."""

    family: BallFamily
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "family", BallFamily(self.family))
        delta = float(self.delta)
        if not np.isfinite(delta):
            raise NonFiniteError("delta must be finite")
        if delta < 0.0:
            raise NegativeDeltaError(f"delta must be >= 0, got {delta}")
        object.__setattr__(self, "delta", delta)


@dataclass(frozen=True, eq=False)
class SortedProblem:
    """A (pmf, objective) pair in objective-ascending order plus prefix stats.

    ``perm[i]`` is the original index of sorted position ``i`` (0-based,
    stable, ties keep original order).  Prefix arrays cover the first
    ``i + 1`` sorted outcomes at entry ``i``; ``prefix_mean``/``prefix_var``
    hold 0.0 wherever the prefix mass is zero.  ``plateau`` is the number of
    leading outcomes tied at the minimal objective value (at least 1).
    """

    perm: np.ndarray
    p_sorted: np.ndarray
    f_sorted: np.ndarray
    prefix_mass: np.ndarray
    prefix_mean: np.ndarray
    prefix_var: np.ndarray
    plateau: int

    @property
    def n(self) -> int:
        return self.p_sorted.size

    def to_original_order(self, sorted_values: np.ndarray) -> np.ndarray:
        """Undo the objective-ascending permutation on a per-outcome vector."""
        out = np.empty(self.n)
        out[self.perm] = sorted_values
        return out


@dataclass(frozen=True, eq=False)
class BoundResult:
    """Optimal expectation plus the distribution attaining it.

    ``minimizer`` is in the original outcome order (for upper bounds it is
    the attaining maximizer).  ``active_index`` is the support size r of the
    optimizer counted in sorted order, so ``r == n`` means full support.
    """

    value: float
    minimizer: Pmf
    active_index: int
    branch: str

    def __post_init__(self):
        if self.branch not in BRANCHES:
            raise DivballError(f"unknown branch tag {self.branch!r}")


def validate(p, f, family: BallFamily | str = BallFamily.TV) -> tuple[Pmf, Objective]:
    """Validate raw weight and payoff vectors for the given ball family.

    Chi-squared balls additionally require a strictly positive center, since
    the divergence is undefined once the reference mass vanishes somewhere.
    """
    family = BallFamily(family)
    pw = np.atleast_1d(np.asarray(p, dtype=float))
    fv = np.atleast_1d(np.asarray(f, dtype=float))
    if pw.size != fv.size:
        raise LengthMismatchError(f"{pw.size} weights vs {fv.size} objective values")
    pmf = Pmf(pw)
    obj = Objective(fv)
    if family is BallFamily.CHI2 and np.any(pmf.weights == 0.0):
        raise ZeroMassForbiddenError(
            "chi-squared balls need a strictly positive center pmf"
        )
    return pmf, obj


def expectation(p: Pmf, f: Objective) -> float:
    """Expected value of ``f`` under ``p``: sum of ``p(x) * f(x)``."""
    if p.n != f.n:
        raise LengthMismatchError(f"{p.n} weights vs {f.n} objective values")
    return float(np.dot(p.weights, f.values))


def suffix_masses(weights: np.ndarray) -> np.ndarray:
    """Compensated tail sums: ``out[i]`` is the mass strictly after index i.

    The final entry is exactly 0.  Kahan compensation keeps threshold
    comparisons and the coordinates derived from them consistent to the
    last ulp.
    """
    n = len(weights)
    out = np.empty(n)
    out[n - 1] = 0.0
    total = 0.0
    comp = 0.0
    for i in range(n - 2, -1, -1):
        y = weights[i + 1] - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[i] = total
    out.flags.writeable = False
    return out


def sort_and_prefix(p: Pmf, f: Objective) -> SortedProblem:
    """Sort outcomes by ascending objective and accumulate prefix statistics.

    The sort is stable (ties keep original order).  Running mean and
    variance use a weighted incremental update (single pass, no
    ``E[f^2] - mu^2`` cancellation), so prefix variances are exact zeros on
    the leading tie plateau and can never go negative.  The prefix mass is
    a compensated running sum.
    """
    if p.n != f.n:
        raise LengthMismatchError(f"{p.n} weights vs {f.n} objective values")
    perm = np.argsort(f.values, kind="stable")
    p_sorted = p.weights[perm]
    f_sorted = f.values[perm]
    n = p_sorted.size

    mass = np.empty(n)
    mean = np.empty(n)
    var = np.empty(n)
    total = 0.0
    comp = 0.0
    mu = 0.0
    m2 = 0.0
    for i in range(n):
        w = p_sorted[i]
        if w > 0.0:
            y = w - comp
            t = total + y
            comp = (t - total) - y
            total = t
            d = f_sorted[i] - mu
            mu += (w / total) * d
            m2 += w * d * (f_sorted[i] - mu)
        mass[i] = total
        mean[i] = mu if total > 0.0 else 0.0
        # m2 can land ~1 ulp below zero when the running mean overshoots the
        # new point by rounding; the reported variance must not.
        var[i] = max(m2, 0.0) / total if total > 0.0 else 0.0

    plateau = int(np.searchsorted(f_sorted, f_sorted[0], side="right"))

    for arr in (perm, p_sorted, f_sorted, mass, mean, var):
        arr.flags.writeable = False
    return SortedProblem(
        perm=perm,
        p_sorted=p_sorted,
        f_sorted=f_sorted,
        prefix_mass=mass,
        prefix_mean=mean,
        prefix_var=var,
        plateau=plateau,
    )
