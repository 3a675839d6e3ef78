"""Shift-parameter normalization of the q-exponential partition sum.

For a spectrum {x_i} and index q, the partition sum as a function of the
shift a is

    f(a) = sum_i [1 - (q - 1)(x_i - a)]^(1/(q-1))

(with exp sums at q = 1).  f is strictly increasing on its domain, so
f(a0) = 1 has at most one root; for 0 < q <= 1 the root always exists,
while for q > 1 it exists iff the value of f at the lower domain
endpoint does not exceed 1.  Solving the root yields a distribution
p_i = [1 - (q-1)(x_i - a0)]^(1/(q-1)) that is normalized with no
explicit partition factor.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Distribution, QParam, Spectrum
from .errors import ConvergenceError, DomainError, InfeasibleError, SingularityError

#: contract on every successful solve: |f(a0) - 1| <= RESIDUAL_BOUND.
RESIDUAL_BOUND = 1e-10

# bisection narrows the bracket to this width before Newton polishing.
_COARSE_WIDTH = 1e-8

# brackets stay this relative margin inside open domain endpoints, where
# the q < 1 sum diverges.
_ENDPOINT_MARGIN = 1e-13


class SolveMethod(enum.Enum):
    BISECTION = "bisection"
    BISECTION_THEN_NEWTON = "bisection_then_newton"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class ShiftSolution:
    """Solved shift a0 with residual and solver diagnostics."""

    a0: float
    residual: float             # f(a0) - 1
    bracket: tuple[float, float]
    iterations: int
    method: SolveMethod


@dataclass(frozen=True)
class FeasibilityReport:
    """Existence test for the q > 1 root.

    ``endpoint_value`` is the exact limit of f at the lower domain
    endpoint; ``sufficient_bound`` is the cruder sufficient bound
    W[(q-1)(x_max - x_min)]^(1/(q-1)) which always dominates it.  A root
    exists iff endpoint_value <= 1.
    """

    endpoint_value: float
    sufficient_bound: float
    feasible: bool


def domain_interval(spectrum: Spectrum, q: QParam) -> tuple[float, float]:
    """Open/closed interval of shifts where every base is non-negative.

    Returns (-inf, x_min - 1/(q-1)) for q < 1, all reals for q = 1, and
    [x_max - 1/(q-1), +inf) for q > 1; endpoints are returned as plain
    floats and infinities.
    """
    if q.is_classical:
        return (-math.inf, math.inf)
    if q.is_sub_unit:
        return (-math.inf, spectrum.x_min - 1.0 / (q.q - 1.0))
    return (spectrum.x_max - 1.0 / (q.q - 1.0), math.inf)


def partition_value(a: float, spectrum: Spectrum, q: QParam) -> float:
    """f(a): the partition sum at shift a.  Strictly increasing in a."""
    x = spectrum.as_array()
    if q.is_classical:
        with np.errstate(over="ignore"):
            return float(np.exp(a - x).sum())
    qm1 = q.q - 1.0
    base = 1.0 - qm1 * (x - a)
    if (base < 0.0).any():
        raise DomainError(f"shift {a} outside the valid domain for q={q.q}")
    with np.errstate(over="ignore", divide="ignore"):
        terms = np.power(base, 1.0 / qm1)
    return float(terms.sum())


def partition_derivative(a: float, spectrum: Spectrum, q: QParam) -> float:
    """f'(a) = sum_i [1 - (q-1)(x_i - a)]^(1/(q-1) - 1); always positive.

    When the exponent 1/(q-1) - 1 is negative (q < 1 or q > 2) the
    derivative is singular at a base of exactly zero, which raises
    :class:`SingularityError`.
    """
    x = spectrum.as_array()
    if q.is_classical:
        with np.errstate(over="ignore"):
            return float(np.exp(a - x).sum())
    qm1 = q.q - 1.0
    base = 1.0 - qm1 * (x - a)
    if (base < 0.0).any():
        raise DomainError(f"shift {a} outside the valid domain for q={q.q}")
    expo = 1.0 / qm1 - 1.0
    if expo < 0.0 and (base == 0.0).any():
        raise SingularityError(f"derivative singular at domain endpoint (q={q.q})")
    with np.errstate(over="ignore", divide="ignore"):
        terms = np.power(base, expo)
    return float(terms.sum())


def feasibility(spectrum: Spectrum, q: QParam) -> FeasibilityReport:
    """Report whether a normalizing shift exists.

    Trivially feasible for q <= 1 (f sweeps (0, inf)); for q > 1 the
    exact endpoint sum decides, and the cruder W-times-max-term bound is
    reported alongside it.
    """
    if not q.is_super_unit:
        return FeasibilityReport(endpoint_value=0.0, sufficient_bound=0.0, feasible=True)
    qm1 = q.q - 1.0
    x = spectrum.as_array()
    terms = np.power(qm1 * (spectrum.x_max - x), 1.0 / qm1)
    endpoint_value = float(terms.sum())
    sufficient_bound = spectrum.W * (qm1 * (spectrum.x_max - spectrum.x_min)) ** (1.0 / qm1)
    return FeasibilityReport(
        endpoint_value=endpoint_value,
        sufficient_bound=float(sufficient_bound),
        feasible=endpoint_value <= 1.0,
    )


def _closed_form(spectrum: Spectrum, q: QParam) -> float | None:
    if spectrum.W == 1:
        # single term equals 1 exactly when a = x_1, for every q
        return spectrum.x_min
    if q.is_classical:
        return float(-np.logaddexp.reduce(-spectrum.as_array()))
    if q.q == 2.0:
        # f is linear in a at q = 2, so f(a) = 1 solves exactly
        return (1.0 - spectrum.W + float(spectrum.as_array().sum())) / spectrum.W
    return None


def solve_shift(
    spectrum: Spectrum,
    q: QParam,
    tol: float = 1e-12,
    max_iter: int = 200,
    use_closed_forms: bool = True,
) -> ShiftSolution:
    """Solve f(a0) = 1 for the normalizing shift.

    Closed forms short-circuit W = 1 (any q), q = 1 and q = 2 unless
    ``use_closed_forms`` is false.  The generic path brackets the root
    (guaranteed by monotonicity and the limits of f), bisects the
    bracket to coarse width, then polishes with Newton steps using
    :func:`partition_derivative`; if a Newton step leaves the bracket or
    hits a singular derivative the solve falls back to pure bisection.

    Raises :class:`InfeasibleError` when q > 1 and no root exists, and
    :class:`ConvergenceError` if the iteration budget is exhausted with
    the residual above ``RESIDUAL_BOUND``.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")

    report = feasibility(spectrum, q)
    if not report.feasible:
        raise InfeasibleError(
            f"no real shift for q={q.q}: endpoint sum {report.endpoint_value} > 1"
        )

    if use_closed_forms:
        a0 = _closed_form(spectrum, q)
        if a0 is not None:
            if q.is_super_unit:
                # a feasible q = 2 root can round a hair below the endpoint
                a0 = max(a0, spectrum.x_max - 1.0 / (q.q - 1.0))
            residual = partition_value(a0, spectrum, q) - 1.0
            if abs(residual) > RESIDUAL_BOUND:
                raise ConvergenceError(f"closed form residual {residual} above bound")
            return ShiftSolution(a0, residual, (a0, a0), 0, SolveMethod.CLOSED_FORM)

    f = lambda a: partition_value(a, spectrum, q)
    span = spectrum.x_max - spectrum.x_min
    iterations = 0

    # --- establish a bracket [lo, hi] with f(lo) < 1 < f(hi) ---
    if q.is_super_unit:
        lo = spectrum.x_max - 1.0 / (q.q - 1.0)
        f_lo = report.endpoint_value
        if f_lo == 1.0:
            # crossing degenerates to the domain endpoint itself
            residual = partition_value(lo, spectrum, q) - 1.0
            if abs(residual) > RESIDUAL_BOUND:
                raise ConvergenceError(f"endpoint residual {residual} above bound")
            return ShiftSolution(lo, residual, (lo, lo), 0, SolveMethod.BISECTION)
        step = 1.0 + span
        hi = lo + step
        while f(hi) <= 1.0:
            step *= 2.0
            hi = lo + step
            iterations += 1
            if iterations > max_iter:
                raise ConvergenceError("failed to bracket the root from above")
    elif q.is_sub_unit:
        endpoint = spectrum.x_min - 1.0 / (q.q - 1.0)
        margin = _ENDPOINT_MARGIN * (1.0 + abs(endpoint))
        hi = endpoint - margin
        while f(hi) <= 1.0:
            # f diverges at the endpoint, so shrinking the margin must
            # eventually put f(hi) above 1
            margin *= 0.5
            hi = endpoint - margin
            iterations += 1
            if iterations > max_iter or hi == endpoint:
                raise ConvergenceError("failed to bracket the root below the endpoint")
        step = 1.0 + span
        lo = hi - step
        while f(lo) >= 1.0:
            step *= 2.0
            lo = hi - step
            iterations += 1
            if iterations > max_iter:
                raise ConvergenceError("failed to bracket the root from below")
    else:
        # q = 1 with closed forms disabled
        f0 = f(0.0)
        if f0 < 1.0:
            lo, step = 0.0, 1.0
            hi = step
            while f(hi) <= 1.0:
                lo = hi
                step *= 2.0
                hi = step
                iterations += 1
                if iterations > max_iter:
                    raise ConvergenceError("failed to bracket the root from above")
        else:
            hi, step = 0.0, 1.0
            lo = -step
            while f(lo) >= 1.0:
                hi = lo
                step *= 2.0
                lo = -step
                iterations += 1
                if iterations > max_iter:
                    raise ConvergenceError("failed to bracket the root from below")

    # --- coarse bisection ---
    while hi - lo > _COARSE_WIDTH and iterations < max_iter:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        iterations += 1
        if fm == 1.0:
            return ShiftSolution(mid, 0.0, (lo, hi), iterations, SolveMethod.BISECTION)
        if fm < 1.0:
            lo = mid
        else:
            hi = mid

    # --- Newton polish inside the bracket ---
    a = 0.5 * (lo + hi)
    residual = f(a) - 1.0
    iterations += 1
    newton_steps = 0
    newton_failed = False
    while abs(residual) > tol:
        if iterations >= max_iter:
            break
        if residual < 0.0:
            lo = a
        else:
            hi = a
        try:
            deriv = partition_derivative(a, spectrum, q)
        except SingularityError:
            newton_failed = True
            break
        if not math.isfinite(deriv) or deriv <= 0.0:
            newton_failed = True
            break
        candidate = a - residual / deriv
        if not (lo < candidate < hi):
            newton_failed = True
            break
        a = candidate
        residual = f(a) - 1.0
        iterations += 1
        newton_steps += 1

    method = SolveMethod.BISECTION_THEN_NEWTON if newton_steps else SolveMethod.BISECTION

    if newton_failed or (abs(residual) > tol and iterations < max_iter):
        # pure-bisection fallback; the bracket is still valid
        method = SolveMethod.BISECTION
        while iterations < max_iter:
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break  # bracket narrowed to float resolution
            fm = f(mid)
            iterations += 1
            a = mid
            residual = fm - 1.0
            if abs(residual) <= tol:
                break
            if fm < 1.0:
                lo = mid
            else:
                hi = mid

    if abs(residual) > RESIDUAL_BOUND:
        raise ConvergenceError(
            f"solver stopped with residual {residual} after {iterations} iterations"
        )
    return ShiftSolution(a, residual, (lo, hi), iterations, method)


def shifted_distribution(
    spectrum: Spectrum,
    q: QParam,
    tol: float = 1e-12,
    max_iter: int = 200,
    use_closed_forms: bool = True,
) -> tuple[Distribution, ShiftSolution]:
    """Solve the shift and evaluate p_i = [1 - (q-1)(x_i - a0)]^(1/(q-1)).

    The probabilities come back in spectrum order and sum to 1 within
    the solver residual bound.
    """
    solution = solve_shift(spectrum, q, tol=tol, max_iter=max_iter,
                           use_closed_forms=use_closed_forms)
    x = spectrum.as_array()
    if q.is_classical:
        probs = np.exp(solution.a0 - x)
    else:
        qm1 = q.q - 1.0
        base = 1.0 - qm1 * (x - solution.a0)
        # roundoff can push the boundary base a hair negative even though
        # a0 lies inside the domain; clamp strictly tiny excursions only
        slack = 4.0 * np.finfo(float).eps * (1.0 + abs(qm1) * (abs(solution.a0) + np.abs(x).max()))
        if (base < -slack).any():
            raise DomainError(f"solved shift {solution.a0} produced a negative base")
        base = np.maximum(base, 0.0)
        with np.errstate(over="ignore", divide="ignore"):
            probs = np.power(base, 1.0 / qm1)
    return Distribution(probs.tolist()), solution
