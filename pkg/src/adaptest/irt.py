"""Numerical kernel for the three-parameter logistic (3PL) response model.

Everything here is a pure function of its inputs: response probability,
its slope, item/test information, the standard error of measurement, and
the iterative maximum-likelihood ability estimator (Fisher scoring).
Ability values are plain floats on the usual -3..+3 scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

# Abilities outside this range are representable but flagged as impractical.
PRACTICAL_ABILITY_RANGE = (-3.0, 3.0)

DEFAULT_SCALE = 1.7

# Default estimator settings: theta is reported to two decimals in practice,
# so 1e-4 on the step size is plenty, and 50 scoring steps never binds.
DEFAULT_TOL = 1e-4
DEFAULT_MAX_ITER = 50
DEFAULT_THETA_GUARD = 4.0

# Keep math.exp away from overflow; exp(700) is already ~1e304.
_EXP_CLAMP = 700.0


class DegenerateInformationError(ValueError):
    """Raised when the summed item information vanishes mid-estimation."""


@dataclass(frozen=True)
class ItemParameters:
    """The 3PL triple (a, b, c) plus the logistic scale constant.

    a: discrimination, > 0
    b: difficulty on the ability scale (practical range -3..3)
    c: pseudo-guessing probability, 0 <= c < 1
    scale: logistic scaling constant, conventionally 1.7
    """

    a: float
    b: float
    c: float = 0.0
    scale: float = DEFAULT_SCALE

    def __post_init__(self) -> None:
        if not (self.a > 0):
            raise ValueError(f"discrimination must be positive, got a={self.a}")
        if not (0.0 <= self.c < 1.0):
            raise ValueError(f"guessing must lie in [0, 1), got c={self.c}")
        if not (self.scale > 0):
            raise ValueError(f"scale constant must be positive, got {self.scale}")
        if not math.isfinite(self.b):
            raise ValueError(f"difficulty must be finite, got b={self.b}")

    @property
    def in_practical_range(self) -> bool:
        lo, hi = PRACTICAL_ABILITY_RANGE
        return lo <= self.b <= hi


@dataclass(frozen=True)
class EstimationResult:
    """Outcome of the iterative ability estimation.

    converged and diverged are mutually exclusive; standard_error is None
    whenever the accumulated test information is zero.
    """

    theta: float
    iterations: int
    converged: bool
    diverged: bool
    standard_error: float | None


# A response pairs the answered item's parameters with u in {0, 1},
# ordered by administration.
Response = tuple[ItemParameters, int]


def icc(p: ItemParameters, theta: float) -> float:
    """Probability of a correct response at ability theta.

    c + (1 - c) / (1 + exp(-scale * a * (theta - b))); strictly increasing
    in theta with limits c and 1.
    """
    z = p.scale * p.a * (theta - p.b)
    if z > _EXP_CLAMP:
        z = _EXP_CLAMP
    elif z < -_EXP_CLAMP:
        z = -_EXP_CLAMP
    return p.c + (1.0 - p.c) / (1.0 + math.exp(-z))


def icc_derivative(p: ItemParameters, theta: float) -> float:
    """Slope dP/dtheta of the response probability; >= 0, maximal at theta = b."""
    prob = icc(p, theta)
    return p.scale * p.a * (prob - p.c) * (1.0 - prob) / (1.0 - p.c)


def item_information(p: ItemParameters, theta: float) -> float:
    """Item information P'^2 / (P (1 - P)) at ability theta."""
    prob = icc(p, theta)
    slope = p.scale * p.a * (prob - p.c) * (1.0 - prob) / (1.0 - p.c)
    return slope * slope / (prob * (1.0 - prob))


def test_information(items: Iterable[ItemParameters], theta: float) -> float:
    """Test information: the sum of item information over ``items``."""
    return sum(item_information(p, theta) for p in items)


def standard_error(i_rr: float) -> float | None:
    """Standard error of measurement 1/sqrt(i_rr); None when i_rr is zero."""
    if i_rr < 0:
        raise ValueError(f"test information cannot be negative, got {i_rr}")
    if i_rr == 0:
        return None
    return 1.0 / math.sqrt(i_rr)


def score_contribution(p: ItemParameters, u: int, theta: float) -> float:
    """One response's term (u - P) * P' / (P (1 - P)) of the likelihood score."""
    if u not in (0, 1):
        raise ValueError(f"response must be 0 or 1, got {u}")
    prob = icc(p, theta)
    slope = p.scale * p.a * (prob - p.c) * (1.0 - prob) / (1.0 - p.c)
    return (u - prob) * slope / (prob * (1.0 - prob))


def estimate_ability(
    responses: Sequence[Response],
    theta0: float = 0.0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    theta_guard: float = DEFAULT_THETA_GUARD,
) -> EstimationResult:
    """Iterative maximum-likelihood ability estimate from scored responses.

    Repeats theta += sum(S_i) / sum(I_i) starting at theta0 until the step
    shrinks below tol (converged), max_iter is reached (neither flag), or
    the iterate leaves (-theta_guard, +theta_guard) -- the all-correct /
    all-incorrect divergence, reported with theta clamped at the guard.

    Raises ValueError on empty input and DegenerateInformationError if the
    summed information vanishes at some iterate.
    """
    if not responses:
        raise ValueError("cannot estimate ability from zero responses")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be at least 1, got {max_iter}")

    theta = theta0
    iterations = 0
    for _ in range(max_iter):
        # One ICC evaluation per response feeds both the score and the
        # information sum.
        score = 0.0
        info = 0.0
        for p, u in responses:
            prob = icc(p, theta)
            slope = p.scale * p.a * (prob - p.c) * (1.0 - prob) / (1.0 - p.c)
            weight = slope / (prob * (1.0 - prob))
            score += (u - prob) * weight
            info += slope * weight
        if info == 0.0:
            raise DegenerateInformationError(
                f"zero test information at theta={theta}; cannot take a step"
            )
        step = score / info
        theta += step
        iterations += 1
        if abs(theta) > theta_guard:
            theta = math.copysign(theta_guard, theta)
            return EstimationResult(
                theta=theta,
                iterations=iterations,
                converged=False,
                diverged=True,
                standard_error=_se_at(responses, theta),
            )
        if abs(step) < tol:
            return EstimationResult(
                theta=theta,
                iterations=iterations,
                converged=True,
                diverged=False,
                standard_error=_se_at(responses, theta),
            )
    return EstimationResult(
        theta=theta,
        iterations=iterations,
        converged=False,
        diverged=False,
        standard_error=_se_at(responses, theta),
    )


def _se_at(responses: Sequence[Response], theta: float) -> float | None:
    return standard_error(test_information((p for p, _ in responses), theta))
