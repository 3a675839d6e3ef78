"""Maximum-entropy reconstruction of the q-exponential distribution.

Maximizing the uncertainty measure under normalization and a mean-energy
constraint (multipliers alpha and beta) yields exactly the shifted
q-exponential on the scaled spectrum {beta * eps_i}: the stationarity
condition reads p_i^(q-1) = (1-q) alpha - (q-1) beta eps_i, which is the
deformed factor with shift a = -1/(q-1) - alpha.  The contrasting escort
construction is self-referential -- its right-hand side depends on the
distribution being solved for -- and is handled by a damped fixed-point
iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Distribution, QParam, Spectrum
from .errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    InfeasibleError,
    NonConvergenceError,
    NormalizationError,
    RangeError,
)
from .shift import ShiftSolution, shifted_distribution


@dataclass(frozen=True)
class LagrangeParams:
    """Multipliers (alpha for normalization, beta for energy) plus energies."""

    alpha: float
    beta: float
    energies: Spectrum

    def __post_init__(self) -> None:
        if not math.isfinite(self.alpha) or not math.isfinite(self.beta):
            raise RangeError("multipliers must be finite")


@dataclass(frozen=True)
class EscortSolution:
    """Fixed point of the self-referential escort distribution."""

    p: Distribution
    residual: float     # max component mismatch under one undamped map application
    iterations: int     # damped updates applied
    converged: bool


def shift_from_alpha(q: QParam, alpha: float) -> float:
    """Shift equivalent to the normalization multiplier.

    a = -1/(q-1) - alpha for q != 1.  The classical branch uses the
    log-normalizer convention a = -alpha, i.e. alpha = ln sum exp(-x).
    """
    if q.is_classical:
        return -alpha
    return -1.0 / (q.q - 1.0) - alpha


def alpha_from_shift(q: QParam, a: float) -> float:
    """Inverse of :func:`shift_from_alpha`."""
    if q.is_classical:
        return -a
    return -1.0 / (q.q - 1.0) - a


def lagrange_distribution(q: QParam, params: LagrangeParams) -> Distribution:
    """Evaluate p_i = [1 - (q-1)(beta eps_i - a)]^(1/(q-1)) from raw multipliers.

    The caller's alpha must already be consistent: the vector is
    required to sum to 1 within 1e-9, otherwise
    :class:`NormalizationError` is raised.  A negative base raises
    :class:`DomainError` (strict policy).
    """
    a = shift_from_alpha(q, params.alpha)
    x = params.beta * params.energies.as_array()
    if q.is_classical:
        with np.errstate(over="ignore"):
            probs = np.exp(a - x)
    else:
        qm1 = q.q - 1.0
        base = 1.0 - qm1 * (x - a)
        if (base < 0.0).any():
            raise DomainError(f"multipliers give a negative base for q={q.q}")
        with np.errstate(over="ignore", divide="ignore"):
            probs = np.power(base, 1.0 / qm1)
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-9:
        raise NormalizationError(f"multipliers inconsistent: probabilities sum to {total}")
    return Distribution(probs.tolist())


def maxent_distribution(
    q: QParam, energies: Spectrum, beta: float, **solver_kwargs
) -> tuple[Distribution, ShiftSolution]:
    """Constrained maximizer of the uncertainty measure at multiplier beta.

    Delegates to the shift solve on the scaled spectrum {beta * eps_i};
    the achieved mean energy is sum p_i eps_i.
    """
    if not math.isfinite(beta):
        raise RangeError(f"beta must be finite, got {beta!r}")
    return shifted_distribution(energies.scaled(beta), q, **solver_kwargs)


def mean_energy(p: Distribution, energies: Spectrum) -> float:
    """Expectation sum_i p_i eps_i."""
    if p.W != energies.W:
        raise ValueError("distribution and spectrum sizes differ")
    return float((p.as_array() * energies.as_array()).sum())


def _feasible_beta_caps(q: QParam, energies: Spectrum) -> tuple[float, float]:
    """Largest |beta| on each side keeping {beta eps_i} solvable for q > 1."""
    if not q.is_super_unit:
        return (-math.inf, math.inf)
    qm1 = q.q - 1.0
    eps = energies.as_array()
    s_plus = float(np.power(qm1 * (energies.x_max - eps), 1.0 / qm1).sum())
    s_minus = float(np.power(qm1 * (eps - energies.x_min), 1.0 / qm1).sum())
    # the endpoint sum scales like |beta|^(1/(q-1)); stay a relative 1e-3
    # inside the boundary, where the root is still resolvable in doubles
    # (at the boundary itself the partition slope can be singular)
    cap_pos = s_plus ** (-qm1) * (1.0 - 1e-3)
    cap_neg = -(s_minus ** (-qm1)) * (1.0 - 1e-3)
    return (cap_neg, cap_pos)


def solve_beta(
    q: QParam,
    energies: Spectrum,
    target_u: float,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> tuple[float, Distribution]:
    """Invert the mean-energy constraint for the multiplier beta.

    The target must lie strictly inside the open energy hull (with a
    one-point spectrum only the single energy itself is allowed).  The
    solve brackets a sign change of U(beta) - target over an expanding
    symmetric interval -- clipped, for q > 1, to the beta range that
    keeps the scaled spectrum solvable -- and then bisects.  Raises
    :class:`RangeError` for targets outside the hull,
    :class:`BracketError` when no sign change exists in the feasible
    range, and :class:`ConvergenceError` on budget exhaustion.
    """
    if not math.isfinite(target_u):
        raise RangeError(f"target energy must be finite, got {target_u!r}")
    if energies.x_min == energies.x_max:
        if target_u != energies.x_min:
            raise RangeError(
                f"flat spectrum admits only target {energies.x_min}, got {target_u}"
            )
        dist, _ = maxent_distribution(q, energies, 0.0)
        return 0.0, dist
    if not (energies.x_min < target_u < energies.x_max):
        raise RangeError(
            f"target {target_u} outside the open hull ({energies.x_min}, {energies.x_max})"
        )

    def gap(beta: float) -> tuple[float, Distribution]:
        dist, _ = maxent_distribution(q, energies, beta)
        return mean_energy(dist, energies) - target_u, dist

    cap_neg, cap_pos = _feasible_beta_caps(q, energies)

    g0, dist0 = gap(0.0)
    if abs(g0) <= tol:
        return 0.0, dist0
    # points evaluated so far, kept sorted by beta
    points: list[tuple[float, float]] = [(0.0, g0)]

    def bracket_from(points: list[tuple[float, float]]) -> tuple[float, float, float, float] | None:
        for (b1, g1), (b2, g2) in zip(points, points[1:]):
            if (g1 < 0.0) != (g2 < 0.0):
                return b1, g1, b2, g2
        return None

    radius = 1.0
    lo_done = hi_done = False
    while not (lo_done and hi_done):
        if not hi_done:
            b = min(radius, cap_pos)
            hi_done = b == cap_pos
            try:
                points.append((b, gap(b)[0]))
            except (InfeasibleError, ConvergenceError):
                hi_done = True  # unusable boundary probe; stop expanding
        if not lo_done:
            b = max(-radius, cap_neg)
            lo_done = b == cap_neg
            try:
                points.insert(0, (b, gap(b)[0]))
            except (InfeasibleError, ConvergenceError):
                lo_done = True
        found = bracket_from(points)
        if found is not None:
            break
        radius *= 2.0
        if radius > 2.0**80:
            break
    found = bracket_from(points)
    if found is None:
        raise BracketError(
            f"no sign change for target {target_u} within the feasible beta range"
        )
    b_lo, g_lo, b_hi, _ = found

    for _ in range(max_iter):
        mid = 0.5 * (b_lo + b_hi)
        if mid == b_lo or mid == b_hi:
            break
        g_mid, dist = gap(mid)
        if abs(g_mid) <= tol:
            return mid, dist
        if (g_mid < 0.0) == (g_lo < 0.0):
            b_lo, g_lo = mid, g_mid
        else:
            b_hi = mid
    raise ConvergenceError(f"beta bisection stalled for target {target_u}")


def stationarity_residual(
    q: QParam, energies: Spectrum, beta: float, **solver_kwargs
) -> float:
    """Max-norm of the Lagrangian gradient at the solved distribution.

    The gradient of the measure is -p_i^(q-1)/(q-1) (classically
    -ln p_i - 1), and the normalization multiplier is reconstructed from
    the solved shift; the classical multiplier absorbs an extra unit
    relative to the log-normalizer convention.  Requires every
    probability to be strictly positive.
    """
    dist, solution = maxent_distribution(q, energies, beta, **solver_kwargs)
    probs = dist.as_array()
    if (probs <= 0.0).any():
        raise DomainError("stationarity gradient requires strictly positive probabilities")
    if q.is_classical:
        alpha = -1.0 - solution.a0
        grad = -np.log(probs) - 1.0
    else:
        alpha = alpha_from_shift(q, solution.a0)
        grad = -np.power(probs, q.q - 1.0) / (q.q - 1.0)
    gradient = grad - alpha - beta * energies.as_array()
    return float(np.abs(gradient).max())


def escort_distribution(
    q_tilde: float,
    energies: Spectrum,
    beta: float,
    damping: float = 0.5,
    tol: float = 1e-10,
    max_iter: int = 10000,
) -> EscortSolution:
    """Solve the self-referential escort distribution by damped fixed point.

    The map sends p to the normalized vector of

        [1 - (1 - q_tilde)(x_i - xbar) / sum_j p_j^q_tilde]^(1/(1-q_tilde))

    where xbar is the escort mean sum p^q_tilde x / sum p^q_tilde and
    x_i = beta eps_i.  Iteration starts from uniform with update
    p <- (1 - damping) p + damping T(p); negative brackets are cut off
    to zero while iterating, but a converged solution must have all
    brackets non-negative (:class:`DomainError` otherwise).  Hitting
    ``max_iter`` raises :class:`NonConvergenceError` carrying the last
    iterate.
    """
    qt = float(q_tilde)
    if not math.isfinite(qt) or qt <= 0.0:
        raise RangeError(f"escort index must be a finite real > 0, got {q_tilde!r}")
    if not (0.0 < damping <= 1.0):
        raise RangeError(f"damping must be in (0, 1], got {damping!r}")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    x = beta * energies.as_array()

    if qt == 1.0:
        shifted = np.exp(-(x - x.min()))
        p = shifted / shifted.sum()
        return EscortSolution(Distribution(p.tolist()), 0.0, 0, True)

    expo = 1.0 / (1.0 - qt)

    def apply_map(p: np.ndarray) -> tuple[np.ndarray, bool]:
        weights = np.power(p, qt)
        denom = float(weights.sum())
        xbar = float((weights * x).sum()) / denom
        brackets = 1.0 - (1.0 - qt) * (x - xbar) / denom
        went_negative = bool((brackets < 0.0).any())
        with np.errstate(over="ignore", divide="ignore"):
            raw = np.where(brackets > 0.0, np.power(np.maximum(brackets, 0.0), expo), 0.0)
        total = float(raw.sum())
        if not math.isfinite(total) or total <= 0.0:
            raise DomainError("escort map left its domain (unnormalizable iterate)")
        return raw / total, went_negative

    p = np.full(energies.W, 1.0 / energies.W)
    updates = 0
    while True:
        mapped, went_negative = apply_map(p)
        residual = float(np.abs(mapped - p).max())
        if residual <= tol:
            if went_negative:
                raise DomainError("escort fixed point has a negative bracket")
            return EscortSolution(Distribution(p.tolist()), residual, updates, True)
        if updates >= max_iter:
            last = EscortSolution(Distribution(p.tolist()), residual, updates, False)
            raise NonConvergenceError(
                f"escort iteration stalled at residual {residual} after {updates} updates",
                solution=last,
            )
        p = (1.0 - damping) * p + damping * mapped
        updates += 1
