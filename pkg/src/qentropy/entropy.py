"""The uncertainty measure of the q-exponential family and its baselines.

The central functional is

    I(p) = (1 - sum_i p_i^q) / (q (q - 1))        (q != 1)
    I(p) = -sum_i p_i ln p_i                      (q == 1)

normalized so that I vanishes on degenerate distributions.  It is
concave for every q > 0, maximal at the uniform distribution, and
composes non-additively over independent subsystems:

    I(AB) = I(A) + I(B) - q (q - 1) I(A) I(B).

Also provided: the Boltzmann-Gibbs and Tsallis baselines, two-state
sweeps for plotting concavity curves, and a finite-difference residual
for the variational identity dI = sum_i x_i dp_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Distribution, QParam, Spectrum, inverse_q_factor
from .errors import DomainError, RangeError, StepError
from .shift import shifted_distribution


@dataclass(frozen=True)
class CompositionResult:
    """Both sides of the non-additive composition identity.

    ``formula_value`` is i_a + i_b + nonextensive_term with
    ``nonextensive_term = -q(q-1) i_a i_b``; ``direct_value`` is the
    measure evaluated on the outer-product distribution.  The two agree
    exactly for independent subsystems.
    """

    i_a: float
    i_b: float
    formula_value: float
    direct_value: float
    nonextensive_term: float


@dataclass(frozen=True)
class SweepTable:
    """Columnar numeric table (headers plus rows) for figure data."""

    headers: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]


def uncertainty(p: Distribution, q: QParam) -> float:
    """The uncertainty measure I(p); >= 0, zero iff p is degenerate."""
    if q.is_classical:
        return bg_entropy(p)
    probs = p.as_array()
    s = float(np.power(probs, q.q).sum())
    # "+ 0.0" normalizes a signed zero from the negative denominator at q < 1
    return (1.0 - s) / (q.q * (q.q - 1.0)) + 0.0


def bg_entropy(p: Distribution) -> float:
    """Boltzmann-Gibbs entropy -sum p ln p with 0 ln 0 := 0."""
    probs = p.as_array()
    positive = probs[probs > 0.0]
    return float(-(positive * np.log(positive)).sum()) + 0.0


def tsallis_entropy(p: Distribution, q_tilde: float) -> float:
    """Tsallis entropy (1 - sum p^q_tilde)/(q_tilde - 1) at the literal index.

    No index conversion is applied here; use ``QParam.tsallis_index`` /
    ``QParam.from_tsallis_index`` for the documented q = 2 - q_tilde
    mapping between the two conventions.  Satisfies
    ``uncertainty(p, q) == tsallis_entropy(p, q) / q`` at equal numeric
    index.
    """
    qt = float(q_tilde)
    if not math.isfinite(qt) or qt <= 0.0:
        raise RangeError(f"tsallis index must be a finite real > 0, got {q_tilde!r}")
    if qt == 1.0:
        return bg_entropy(p)
    probs = p.as_array()
    s = float(np.power(probs, qt).sum())
    return (1.0 - s) / (qt - 1.0) + 0.0


def compose(p_a: Distribution, p_b: Distribution, q: QParam) -> CompositionResult:
    """Evaluate the composition identity for the independent pair (A, B)."""
    i_a = uncertainty(p_a, q)
    i_b = uncertainty(p_b, q)
    nonextensive_term = -q.q * (q.q - 1.0) * i_a * i_b + 0.0
    formula_value = i_a + i_b + nonextensive_term
    joint = np.outer(p_a.as_array(), p_b.as_array()).ravel()
    direct_value = uncertainty(Distribution(joint.tolist()), q)
    return CompositionResult(i_a, i_b, formula_value, direct_value, nonextensive_term)


def max_uncertainty(W: int, q: QParam) -> float:
    """Closed-form maximum of the measure, attained at the uniform vector.

    (1 - W^(1-q)) / (q (q-1)) for q != 1 and ln W at q = 1.
    """
    if W < 1:
        raise RangeError(f"state count must be >= 1, got {W!r}")
    if q.is_classical:
        return math.log(W)
    return (1.0 - float(W) ** (1.0 - q.q)) / (q.q * (q.q - 1.0)) + 0.0


def two_state_sweep(q_list: Sequence[QParam], n_points: int = 201) -> SweepTable:
    """Tabulate I((p1, 1 - p1), q) over an inclusive uniform p1 grid.

    One column per q, headers "p1", "I_q=<value>", rows in ascending
    grid order.  Endpoints evaluate to exactly zero and every column is
    concave in p1.
    """
    if n_points < 3:
        raise RangeError(f"need at least 3 grid points, got {n_points!r}")
    params = list(q_list)
    if not params:
        raise RangeError("need at least one q value to sweep")
    headers = ("p1",) + tuple(f"I_q={qp.q!r}" for qp in params)
    rows = []
    for p1 in np.linspace(0.0, 1.0, n_points):
        dist = Distribution((float(p1), float(1.0 - p1)))
        rows.append((float(p1),) + tuple(uncertainty(dist, qp) for qp in params))
    return SweepTable(headers, tuple(rows))


def varentropy_residual(
    spectrum: Spectrum, q: QParam, dp: Sequence[float], step: float
) -> float:
    """Check dI = sum_i x_i dp_i along a zero-sum tangent by forward difference.

    The self-normalized distribution p of ``spectrum`` recovers its
    values through x_i = inverse_q_factor(p_i, q, a0); the returned
    residual |[I(p + step dp) - I(p)]/step - sum x_i dp_i| is first
    order in ``step``.  Raises :class:`StepError` when the stepped
    vector leaves the simplex.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    tangent = np.asarray(dp, dtype=float)
    if tangent.shape != (spectrum.W,):
        raise ValueError(f"tangent length {tangent.size} != spectrum size {spectrum.W}")
    scale = max(1.0, float(np.abs(tangent).sum()))
    if abs(float(tangent.sum())) > 1e-12 * scale:
        raise ValueError("tangent must sum to zero")

    dist, solution = shifted_distribution(spectrum, q)
    probs = dist.as_array()
    if (probs <= 0.0).any():
        raise DomainError("variational check requires strictly positive probabilities")
    moved = probs + step * tangent
    if (moved < 0.0).any() or (moved > 1.0).any():
        raise StepError(f"step {step} leaves the probability simplex")

    i_now = uncertainty(dist, q)
    i_moved = uncertainty(Distribution(moved.tolist()), q)
    xs = np.array([inverse_q_factor(float(pi), q, solution.a0) for pi in probs])
    pairing = float((xs * tangent).sum())
    return abs((i_moved - i_now) / step - pairing)
