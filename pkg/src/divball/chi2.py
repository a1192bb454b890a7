"""Closed-form worst-case expectation over a chi-squared divergence ball.

For a strictly positive center p and outcomes in ascending objective order,
the optimal distribution keeps a contiguous bottom support {1..r} and tilts
the renormalized center linearly in the objective:

    q(x_i) = p(x_i)/m_r * (1 - (f(x_i) - mu_r)/sigma_r * sqrt(m_r*delta - t_r))

with m_r, mu_r, sigma_r^2 the prefix mass/mean/variance over the support and
t_r the mass after it.  The support size is governed by critical radii

    delta_k = (sigma_k^2 / (f(x_k) - mu_k)^2 + t_k) / m_k,

which are positive and non-increasing in k; the active support is the
largest k whose critical radius still exceeds the requested one.  Once the
radius passes every finite critical value, only the outcomes tied at the
minimal objective remain and the bound saturates at that minimal value.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    BRANCH_INTERIOR,
    BRANCH_PLATEAU,
    BoundResult,
    Objective,
    Pmf,
    SortedProblem,
    sort_and_prefix,
    suffix_masses,
)
from .errors import (
    DivballError,
    LengthMismatchError,
    NegativeDeltaError,
    TiedBottomError,
    WrongArityError,
    ZeroMassForbiddenError,
)

# Radicand m_r*delta - t_r may dip this far below zero from roundoff at a
# breakpoint; anything worse indicates an inconsistent (r, delta) pair.
_RADICAND_SLACK = 1e-12
# Minimizer coordinates may round to tiny negatives exactly at a critical
# radius, where the exact value is 0.
_COORDINATE_SLACK = 1e-9


def chi2_divergence(q: Pmf, p: Pmf) -> float:
    """Chi-squared divergence: sum of ``(q(x) - p(x))^2 / p(x)``.

    Asymmetric; requires a strictly positive reference ``p``.
    """
    if q.n != p.n:
        raise LengthMismatchError(f"{q.n} vs {p.n} outcomes")
    if np.any(p.weights == 0.0):
        raise ZeroMassForbiddenError("chi-squared divergence needs p > 0 everywhere")
    diff = q.weights - p.weights
    return float(np.sum(diff * diff / p.weights))


@dataclass(frozen=True, eq=False)
class CriticalDeltas:
    """Breakpoint radii at which the optimal support loses its top outcome.

    ``finite[j]`` is the critical radius for support size ``plateau + 1 + j``
    (so the array is empty when the objective is constant).  The plateau
    support itself never shrinks; its radius is unbounded and is represented
    structurally rather than by a float sentinel.
    """

    plateau: int
    n: int
    finite: np.ndarray

    def delta(self, k: int) -> float:
        """Critical radius for support size k; ``math.inf`` for the plateau.

        Display/test convenience only; solver code never mixes the
        unbounded marker into arithmetic.
        """
        if not self.plateau <= k <= self.n:
            raise DivballError(f"support size {k} outside [{self.plateau}, {self.n}]")
        if k == self.plateau:
            return math.inf
        return float(self.finite[k - self.plateau - 1])


def _require_positive(sp: SortedProblem) -> None:
    if np.any(sp.p_sorted == 0.0):
        raise ZeroMassForbiddenError(
            "chi-squared balls need a strictly positive center pmf"
        )


def critical_deltas(sp: SortedProblem) -> CriticalDeltas:
    """Critical radii for every support size above the bottom tie plateau."""
    _require_positive(sp)
    ell = sp.plateau
    n = sp.n
    tails = suffix_masses(sp.p_sorted)
    finite = np.empty(n - ell)
    for k in range(ell + 1, n + 1):
        i = k - 1
        gap = sp.f_sorted[i] - sp.prefix_mean[i]
        assert gap > 0.0 and sp.prefix_var[i] > 0.0, "non-plateau prefix is constant"
        finite[k - ell - 1] = (
            sp.prefix_var[i] / (gap * gap) + tails[i]
        ) / sp.prefix_mass[i]
    if finite.size:
        assert finite[-1] > 0.0, "critical radii must be positive"
        for j in range(finite.size - 1):
            # Non-increasing up to roundoff; a real inversion is a bug here,
            # not bad user input.
            assert finite[j + 1] <= finite[j] + 1e-12 * (1.0 + abs(finite[j]))
    finite.flags.writeable = False
    return CriticalDeltas(plateau=ell, n=n, finite=finite)


def chi2_active_index(cd: CriticalDeltas, delta: float) -> int:
    """Largest support size whose critical radius strictly exceeds ``delta``.

    Falls back to the plateau size when every finite critical radius is
    covered; returns ``n`` for radii below the smallest one.
    """
    if delta < 0.0:
        raise NegativeDeltaError(f"delta must be >= 0, got {delta}")
    for k in range(cd.n, cd.plateau, -1):
        if cd.finite[k - cd.plateau - 1] > delta:
            return k
    return cd.plateau


def _radicand(mass: float, tail: float, delta: float) -> float:
    rad = mass * delta - tail
    if rad < 0.0:
        if rad >= -_RADICAND_SLACK * (1.0 + mass * delta + tail):
            return 0.0
        raise DivballError(
            f"radius {delta} is infeasible for the requested support (radicand {rad})"
        )
    return rad


def chi2_minimizer(sp: SortedProblem, r: int, delta: float) -> Pmf:
    """Attaining distribution for support size ``r``, in sorted order.

    For ``r`` above the plateau this is the tilted renormalized center with
    boundary divergence exactly ``delta``; every coordinate on the support is
    positive while ``delta`` stays below the support's critical radius, and
    the top coordinate vanishes exactly at it.  For ``r`` equal to the
    plateau size the canonical choice is the minimum-divergence distribution:
    the center renormalized on the plateau.

    ``r`` must come from :func:`chi2_active_index` (or be a critical-radius
    probe at ``delta == delta_r``); other pairs are rejected.
    """
    _require_positive(sp)
    if delta < 0.0:
        raise NegativeDeltaError(f"delta must be >= 0, got {delta}")
    ell = sp.plateau
    if not ell <= r <= sp.n:
        raise DivballError(f"support size {r} outside [{ell}, {sp.n}]")

    q = np.zeros(sp.n)
    if r == ell:
        q[:ell] = sp.p_sorted[:ell] / sp.prefix_mass[ell - 1]
        return Pmf(q)

    i = r - 1
    mass = sp.prefix_mass[i]
    tail = suffix_masses(sp.p_sorted)[i]
    sigma2 = sp.prefix_var[i]
    assert sigma2 > 0.0, "interior support has positive prefix variance"
    scale = math.sqrt(_radicand(mass, tail, delta)) / math.sqrt(sigma2)
    head = (sp.p_sorted[: i + 1] / mass) * (
        1.0 - (sp.f_sorted[: i + 1] - sp.prefix_mean[i]) * scale
    )
    negative = head < 0.0
    if np.any(head[negative] < -_COORDINATE_SLACK):
        raise DivballError(
            f"radius {delta} exceeds the critical radius for support size {r}"
        )
    head[negative] = 0.0
    q[: i + 1] = head
    return Pmf(q)


def _solve(sp: SortedProblem, cd: CriticalDeltas, delta: float):
    r = chi2_active_index(cd, delta)
    if r == cd.plateau:
        return float(sp.f_sorted[0]), r, BRANCH_PLATEAU
    i = r - 1
    tail = suffix_masses(sp.p_sorted)[i]
    rad = _radicand(sp.prefix_mass[i], tail, delta)
    value = sp.prefix_mean[i] - math.sqrt(sp.prefix_var[i]) * math.sqrt(rad)
    return float(value), r, BRANCH_INTERIOR


def chi2_lower_expectation(p: Pmf, f: Objective, delta: float) -> BoundResult:
    """Exact minimum of the expectation over the radius-``delta`` chi^2 ball.

    The value is ``mu_r - sigma_r * sqrt(m_r*delta - t_r)`` on the active
    support, saturating at the minimal objective value once the radius
    covers every finite critical radius.  The attaining minimizer is
    returned in original outcome order.
    """
    if delta < 0.0:
        raise NegativeDeltaError(f"delta must be >= 0, got {delta}")
    sp = sort_and_prefix(p, f)
    cd = critical_deltas(sp)
    value, r, branch = _solve(sp, cd, delta)
    q_sorted = chi2_minimizer(sp, r, delta)
    minimizer = Pmf(sp.to_original_order(q_sorted.weights), labels=p.labels)
    return BoundResult(value=value, minimizer=minimizer, active_index=r, branch=branch)


def chi2_upper_expectation(p: Pmf, f: Objective, delta: float) -> BoundResult:
    """Exact maximum over the chi^2 ball, by conjugacy with the negated payoff."""
    res = chi2_lower_expectation(p, f.negated(), delta)
    return BoundResult(
        value=-res.value,
        minimizer=res.minimizer,
        active_index=res.active_index,
        branch=res.branch,
    )


def _sorted_pairs(p: Pmf, f: Objective):
    order = np.argsort(f.values, kind="stable")
    return p.weights[order], f.values[order]


def chi2_two_point(p: Pmf, f: Objective, delta: float) -> float:
    """Two-outcome closed form, kept as an independent cross-check.

    With (p1, f1) the lower-objective outcome and (p2, f2) the other:
    ``p1*f1 + p2*f2 - sqrt(delta*p1*p2)*|f2 - f1|`` while
    ``delta < p2/p1``, and ``f1`` from there on.
    """
    if p.n != 2 or f.n != 2:
        raise WrongArityError(f"two-point form needs n = 2, got n = {p.n}")
    if np.any(p.weights == 0.0):
        raise ZeroMassForbiddenError("chi-squared balls need a strictly positive center pmf")
    if delta < 0.0:
        raise NegativeDeltaError(f"delta must be >= 0, got {delta}")
    (p1, p2), (f1, f2) = _sorted_pairs(p, f)
    if delta < p2 / p1:
        return float(p1 * f1 + p2 * f2 - math.sqrt(delta * p1 * p2) * abs(f2 - f1))
    return float(f1)


def chi2_three_point(p: Pmf, f: Objective, delta: float) -> float:
    """Three-outcome closed form, kept as an independent cross-check.

    Evaluates the explicit three-branch case split directly from
    definitional prefix statistics (no shared incremental machinery).
    Requires a unique minimal objective value; tied bottoms belong to the
    general solver.
    """
    if p.n != 3 or f.n != 3:
        raise WrongArityError(f"three-point form needs n = 3, got n = {p.n}")
    if np.any(p.weights == 0.0):
        raise ZeroMassForbiddenError("chi-squared balls need a strictly positive center pmf")
    if delta < 0.0:
        raise NegativeDeltaError(f"delta must be >= 0, got {delta}")
    (p1, p2, p3), (f1, f2, f3) = _sorted_pairs(p, f)
    if f1 == f2:
        raise TiedBottomError(
            "three-point form needs a unique minimal objective value; "
            "use the general solver"
        )
    m2 = p1 + p2
    mu2 = (p1 * f1 + p2 * f2) / m2
    var2 = (p1 * (f1 - mu2) ** 2 + p2 * (f2 - mu2) ** 2) / m2
    mu3 = p1 * f1 + p2 * f2 + p3 * f3
    var3 = p1 * (f1 - mu3) ** 2 + p2 * (f2 - mu3) ** 2 + p3 * (f3 - mu3) ** 2
    d3 = var3 / (f3 - mu3) ** 2
    d2 = (var2 / (f2 - mu2) ** 2 + 1.0 - m2) / m2
    if delta < d3:
        return float(mu3 - math.sqrt(var3) * math.sqrt(delta))
    if delta < d2:
        return float(mu2 - math.sqrt(var2) * math.sqrt(m2 * delta - (1.0 - m2)))
    return float(f1)
