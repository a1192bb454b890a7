"""Batch front end: read problem files, compute bounds, sweep radii, solve
robustness-radius queries, and optionally certify against the grid oracle.

Problem files are JSON objects:

    {"labels": ["a", "b"],          # optional
     "p": [0.3, 0.7],
     "f": [0.0, 1.0],
     "ball": "tv",                  # or "chi2"
     "delta": 0.2}                  # or "sweep": {"start":0,"stop":1,"steps":11}

Exit codes: 0 success, 2 invalid input, 3 oracle check failed,
4 unreachable radius threshold.
"""

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chi2 import chi2_lower_expectation, chi2_upper_expectation
from .core import BallFamily, BallSpec, BoundResult, Objective, Pmf, expectation, validate
from .errors import DivballError, NonFiniteError, UnreachableError
from .oracle import (
    naive_chi2_divergence,
    naive_tv_distance,
    oracle_check_verdict,
    oracle_lower_expectation,
)
from .tv import tv_lower_expectation, tv_upper_expectation

_UNSET = object()


@dataclass(frozen=True)
class ProblemFile:
    """A fully resolved problem: validated inputs plus one radius or a sweep."""

    pmf: Pmf
    objective: Objective
    family: BallFamily
    delta: float | None
    sweep: tuple[float, float, int] | None


@dataclass(frozen=True)
class RadiusQuery:
    """Threshold query: smallest radius whose lower expectation reaches theta."""

    theta: float
    direction: str = "lower_below"

    def __post_init__(self):
        if not np.isfinite(self.theta):
            raise NonFiniteError("radius threshold must be finite")
        if self.direction != "lower_below":
            raise DivballError(f"unsupported radius direction {self.direction!r}")


def lower_expectation(pmf: Pmf, objective: Objective, family: BallFamily, delta: float) -> BoundResult:
    if BallFamily(family) is BallFamily.TV:
        return tv_lower_expectation(pmf, objective, delta)
    return chi2_lower_expectation(pmf, objective, delta)


def upper_expectation(pmf: Pmf, objective: Objective, family: BallFamily, delta: float) -> BoundResult:
    if BallFamily(family) is BallFamily.TV:
        return tv_upper_expectation(pmf, objective, delta)
    return chi2_upper_expectation(pmf, objective, delta)


def robustness_radius(
    pmf: Pmf, objective: Objective, family: BallFamily, theta: float
) -> float:
    """Smallest radius at which the lower expectation drops to ``theta``.

    The lower expectation is continuous and non-increasing in the radius, so
    bisection applies; the answer carries an absolute radius tolerance of
    1e-10.  Thresholds at or above the center expectation need no budget at
    all; thresholds below the objective's minimum are unreachable.
    """
    family = BallFamily(family)
    query = RadiusQuery(theta)
    theta = float(query.theta)
    if theta >= expectation(pmf, objective):
        return 0.0
    f_min = float(objective.values.min())
    if theta < f_min:
        raise UnreachableError(
            f"threshold {theta} lies below the objective minimum {f_min}"
        )

    def lower(delta: float) -> float:
        return lower_expectation(pmf, objective, family, delta).value

    if family is BallFamily.TV:
        hi = 1.0
    else:
        hi = 1.0
        while lower(hi) > theta:
            hi *= 2.0
            if hi > 2.0**512:
                raise RuntimeError("radius bracket failed to close")
    lo = 0.0
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if lower(mid) <= theta:
            hi = mid
        else:
            lo = mid
    return hi


def load_problem_dict(obj) -> dict:
    """Schema-check a raw problem object; returns the cleaned field dict."""
    if not isinstance(obj, dict):
        raise DivballError("problem file must be a JSON object")
    allowed = {"labels", "p", "f", "ball", "delta", "sweep"}
    unknown = set(obj) - allowed
    if unknown:
        raise DivballError(f"unknown problem keys: {sorted(unknown)}")
    for key in ("p", "f"):
        if key not in obj:
            raise DivballError(f"problem is missing required key '{key}'")
        if not isinstance(obj[key], list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj[key]
        ):
            raise DivballError(f"'{key}' must be a list of numbers")
    if "ball" not in obj:
        raise DivballError("problem is missing required key 'ball'")
    if obj["ball"] not in ("tv", "chi2"):
        raise DivballError("'ball' must be \"tv\" or \"chi2\"")
    if "labels" in obj and (
        not isinstance(obj["labels"], list)
        or not all(isinstance(v, str) for v in obj["labels"])
    ):
        raise DivballError("'labels' must be a list of strings")
    if "delta" in obj and "sweep" in obj:
        raise DivballError("give exactly one of 'delta' and 'sweep', not both")
    if "delta" in obj and not isinstance(obj["delta"], (int, float)):
        raise DivballError("'delta' must be a number")
    if "sweep" in obj:
        obj = {**obj, "sweep": _parse_sweep_dict(obj["sweep"])}
    return obj


def _parse_sweep_dict(sweep) -> tuple[float, float, int]:
    if not isinstance(sweep, dict) or set(sweep) != {"start", "stop", "steps"}:
        raise DivballError("'sweep' must be an object with start, stop and steps")
    start, stop, steps = sweep["start"], sweep["stop"], sweep["steps"]
    if not isinstance(start, (int, float)) or not isinstance(stop, (int, float)):
        raise DivballError("'sweep.start' and 'sweep.stop' must be numbers")
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 2:
        raise DivballError("'sweep.steps' must be an integer >= 2")
    start, stop = float(start), float(stop)
    if start < 0.0:
        raise DivballError("'sweep.start' must be >= 0")
    if stop < start:
        raise DivballError("'sweep.stop' must be >= 'sweep.start'")
    return start, stop, int(steps)


def _parse_sweep_flag(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise DivballError("--sweep expects START:STOP:STEPS")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise DivballError(f"bad --sweep value: {exc}") from None
    return _parse_sweep_dict({"start": start, "stop": stop, "steps": steps})


def resolve_problem(obj: dict, args=None) -> ProblemFile:
    """Merge CLI overrides into a schema-checked problem dict and validate."""
    fields = load_problem_dict(obj)
    family = fields["ball"]
    delta = fields.get("delta")
    sweep = fields.get("sweep")
    if args is not None:
        if args.ball is not None:
            family = args.ball
        if args.delta is not None:
            delta, sweep = args.delta, None
        elif args.sweep is not None:
            delta, sweep = None, _parse_sweep_flag(args.sweep)
    family = BallFamily(family)
    pmf, objective = validate(fields["p"], fields["f"], family)
    if fields.get("labels") is not None:
        pmf = Pmf(pmf.weights, labels=tuple(fields["labels"]))
    if delta is not None:
        # Radius validity (>= 0, finite) is BallSpec's concern.
        delta = BallSpec(family, float(delta)).delta
    return ProblemFile(
        pmf=pmf, objective=objective, family=family, delta=delta, sweep=sweep
    )


def _require_single_delta(problem: ProblemFile) -> float:
    if problem.delta is None:
        raise DivballError("this mode needs a single 'delta' (no sweep)")
    return problem.delta


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _bound_row(problem: ProblemFile, delta: float) -> dict:
    lo = lower_expectation(problem.pmf, problem.objective, problem.family, delta)
    up = upper_expectation(problem.pmf, problem.objective, problem.family, delta)
    return {
        "delta": float(delta),
        "lower": lo.value,
        "upper": up.value,
        "r": lo.active_index,
        "branch": lo.branch,
        "minimizer": [float(w) for w in lo.minimizer.weights],
    }


def run_bound(problem: ProblemFile, output: str | None = None) -> str:
    """Render bound output: JSON for a single radius, CSV rows for a sweep.

    ``output`` forces a format; sweeps default to CSV and single radii to
    JSON.  CSV columns are ``delta,lower,upper,r,branch`` with 17
    significant digits, '.' decimals and LF line endings.
    """
    if (problem.delta is None) == (problem.sweep is None):
        raise DivballError("give exactly one of 'delta' and 'sweep'")
    if problem.delta is not None:
        row = _bound_row(problem, problem.delta)
        if output == "csv":
            return _render_csv([row])
        payload = {
            "value": row["lower"],
            "upper_value": row["upper"],
            "r": row["r"],
            "branch": row["branch"],
            "minimizer": row["minimizer"],
            "delta": row["delta"],
            "ball": problem.family.value,
        }
        if problem.pmf.labels is not None:
            payload["labels"] = list(problem.pmf.labels)
        return json.dumps(payload)
    start, stop, steps = problem.sweep
    rows = [_bound_row(problem, d) for d in np.linspace(start, stop, steps)]
    if output == "json":
        return json.dumps(
            [{k: row[k] for k in ("delta", "lower", "upper", "r", "branch")} for row in rows]
        )
    return _render_csv(rows)


def _render_csv(rows) -> str:
    lines = ["delta,lower,upper,r,branch"]
    for row in rows:
        lines.append(
            f"{_fmt(row['delta'])},{_fmt(row['lower'])},{_fmt(row['upper'])},"
            f"{row['r']},{row['branch']}"
        )
    return "\n".join(lines)


def run_radius(problem: ProblemFile, theta: float) -> str:
    delta_star = robustness_radius(
        problem.pmf, problem.objective, problem.family, theta
    )
    return json.dumps(
        {"theta": float(theta), "delta_star": delta_star, "ball": problem.family.value}
    )


def run_oracle_check(problem: ProblemFile, resolution: int | None) -> tuple[str, bool]:
    """Certify the closed form against the grid oracle at one radius."""
    delta = _require_single_delta(problem)
    closed = lower_expectation(problem.pmf, problem.objective, problem.family, delta)
    ball = BallSpec(problem.family, delta)
    report = oracle_lower_expectation(problem.pmf, problem.objective, ball, resolution)
    if problem.family is BallFamily.TV:
        dist = naive_tv_distance(closed.minimizer, problem.pmf)
    else:
        dist = naive_chi2_divergence(closed.minimizer, problem.pmf)
    ok = oracle_check_verdict(closed.value, report, dist, delta)
    payload = {
        "closed_form": closed.value,
        "grid_minimum": report.grid_minimum,
        "tolerance": report.tolerance,
        "pass": ok,
        "resolution": report.resolution,
        "feasible_count": report.feasible_count,
        "minimizer_distance": dist,
    }
    return json.dumps(payload), ok


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divball",
        description=(
            "Exact lower/upper expectation bounds over total-variation and "
            "chi-squared divergence balls around a finite pmf."
        ),
    )
    parser.add_argument(
        "--input",
        default="-",
        metavar="PATH",
        help="problem file (JSON); '-' reads stdin (default)",
    )
    parser.add_argument(
        "--ball",
        choices=["tv", "chi2"],
        help="override the ball family from the file",
    )
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--delta", type=float, help="override: single radius")
    group.add_argument(
        "--sweep",
        metavar="START:STOP:STEPS",
        help="override: inclusive linear radius sweep",
    )
    parser.add_argument(
        "--radius",
        type=float,
        metavar="THETA",
        help="find the smallest radius whose lower expectation drops to THETA",
    )
    parser.add_argument(
        "--oracle-check",
        nargs="?",
        const=None,
        default=_UNSET,
        type=int,
        metavar="RESOLUTION",
        help="certify the closed form against the brute-force grid oracle",
    )
    parser.add_argument(
        "--output",
        choices=["json", "csv"],
        help="output format (default: json for a single radius, csv for sweeps)",
    )
    parser.add_argument(
        "--quiet", action="store_true", help="suppress informational stderr output"
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.input == "-":
            raw = sys.stdin.read()
        else:
            raw = Path(args.input).read_text(encoding="utf-8")
        problem = resolve_problem(json.loads(raw), args)

        if args.radius is not None and args.oracle_check is not _UNSET:
            raise DivballError("--radius and --oracle-check are separate modes")
        if args.radius is not None:
            print(run_radius(problem, args.radius))
        elif args.oracle_check is not _UNSET:
            text, ok = run_oracle_check(problem, args.oracle_check)
            print(text)
            if not ok:
                if not args.quiet:
                    print("oracle check failed", file=sys.stderr)
                return 3
        else:
            print(run_bound(problem, args.output))
        return 0
    except UnreachableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (DivballError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
