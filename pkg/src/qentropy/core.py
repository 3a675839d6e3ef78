"""Domain types and q-deformed scalar primitives.

The deformed exponential used throughout is

    [1 - (q - 1) x]^(1/(q-1))        (q != 1)
    exp(-x)                          (q == 1)

which is strictly decreasing in x on its domain and reduces to the
ordinary exponential in the q -> 1 limit.  ``QParam`` carries the
deformation index, ``Spectrum`` a finite list of random-variable values,
and ``Distribution`` a validated probability vector.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, EmptyError, NormalizationError, RangeError

#: |sum(p) - 1| allowed when constructing a Distribution (user-input slack).
NORMALIZATION_TOL = 1e-9


class Mode(enum.Enum):
    """Policy for a negative base inside the deformed power."""

    STRICT = "strict"    # raise DomainError
    CUTOFF = "cutoff"    # evaluate to 0


class QRegime(enum.Enum):
    """Classification of the deformation index relative to 1."""

    SUB_UNIT = "sub_unit"      # 0 < q < 1
    CLASSICAL = "classical"    # q == 1 exactly
    SUPER_UNIT = "super_unit"  # q > 1


@dataclass(frozen=True)
class QParam:
    """Deformation index q, required to be a finite real > 0.

    The classification against 1 is exact (no epsilon band); q == 1.0
    selects dedicated exp/log branches everywhere instead of limiting
    numerics.  The alternate Tsallis-style index relates to q through
    ``q = 2 - q_tilde`` and is exposed via :meth:`from_tsallis_index`
    and :attr:`tsallis_index`.
    """

    q: float

    def __post_init__(self) -> None:
        qv = float(self.q)
        if not math.isfinite(qv) or qv <= 0.0:
            raise RangeError(f"deformation index must be a finite real > 0, got {self.q!r}")
        object.__setattr__(self, "q", qv)

    @property
    def regime(self) -> QRegime:
        if self.q == 1.0:
            return QRegime.CLASSICAL
        return QRegime.SUB_UNIT if self.q < 1.0 else QRegime.SUPER_UNIT

    @property
    def is_classical(self) -> bool:
        return self.q == 1.0

    @property
    def is_sub_unit(self) -> bool:
        return self.q < 1.0

    @property
    def is_super_unit(self) -> bool:
        return self.q > 1.0

    @property
    def tsallis_index(self) -> float:
        """The alternate index q_tilde = 2 - q."""
        return 2.0 - self.q

    @classmethod
    def from_tsallis_index(cls, q_tilde: float) -> "QParam":
        """Build from the alternate index via q = 2 - q_tilde."""
        return cls(2.0 - float(q_tilde))


@dataclass(frozen=True)
class Spectrum:
    """Finite list of real values x_1..x_W (duplicates allowed, W >= 1)."""

    values: tuple[float, ...]
    x_min: float = field(init=False)
    x_max: float = field(init=False)

    def __init__(self, values: Iterable[float]):
        vals = tuple(float(v) for v in values)
        if not vals:
            raise EmptyError("spectrum requires at least one value")
        if not all(math.isfinite(v) for v in vals):
            raise RangeError("spectrum values must all be finite")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "x_min", min(vals))
        object.__setattr__(self, "x_max", max(vals))

    @property
    def W(self) -> int:
        return len(self.values)

    @cached_property
    def _array(self) -> np.ndarray:
        arr = np.asarray(self.values, dtype=float)
        arr.flags.writeable = False
        return arr

    def as_array(self) -> np.ndarray:
        return self._array

    def scaled(self, factor: float) -> "Spectrum":
        """Spectrum with every value multiplied by ``factor``."""
        return Spectrum(factor * v for v in self.values)

    def shifted(self, offset: float) -> "Spectrum":
        """Spectrum with ``offset`` added to every value."""
        return Spectrum(v + offset for v in self.values)


@dataclass(frozen=True)
class Distribution:
    """Probability vector on W microstates; validated, stored unrenormalized."""

    probs: tuple[float, ...]

    def __init__(self, probs: Iterable[float]):
        vals = tuple(float(p) for p in probs)
        if not vals:
            raise EmptyError("distribution requires at least one probability")
        for p in vals:
            if not (0.0 <= p <= 1.0):  # also rejects NaN
                raise RangeError(f"probability {p!r} outside [0, 1]")
        total = math.fsum(vals)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NormalizationError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probs", vals)

    @property
    def W(self) -> int:
        return len(self.probs)

    @cached_property
    def _array(self) -> np.ndarray:
        arr = np.asarray(self.probs, dtype=float)
        arr.flags.writeable = False
        return arr

    def as_array(self) -> np.ndarray:
        return self._array


def q_factor(x: float, q: QParam, mode: Mode = Mode.STRICT) -> float:
    """Evaluate the deformed exponential at x.

    Strict mode raises :class:`DomainError` when the base 1 - (q-1)x is
    negative; cutoff mode returns 0 there instead.  Both modes agree on
    the valid domain and return exp(-x) at q = 1.
    """
    xv = float(x)
    if not math.isfinite(xv):
        raise RangeError(f"argument must be finite, got {x!r}")
    if q.is_classical:
        try:
            return math.exp(-xv)
        except OverflowError:
            return math.inf
    base = 1.0 - (q.q - 1.0) * xv
    if base < 0.0:
        if mode is Mode.STRICT:
            raise DomainError(f"negative base {base} at x={xv}, q={q.q}")
        return 0.0
    expo = 1.0 / (q.q - 1.0)
    if base == 0.0:
        return 0.0 if expo > 0.0 else math.inf
    try:
        return base ** expo
    except OverflowError:
        return math.inf


def inverse_q_factor(p: float, q: QParam, a: float = 0.0) -> float:
    """Recover x from p = q_factor(x - a, q).

    Returns (1 - p^(q-1))/(q-1) + a, or -ln(p) + a at q = 1.  Requires
    p > 0; the round trip through :func:`q_factor` is exact to roundoff
    for p bounded away from zero.
    """
    pv = float(p)
    if pv <= 0.0:
        raise DomainError(f"probability must be positive to invert, got {p!r}")
    if q.is_classical:
        return -math.log(pv) + a
    return (1.0 - pv ** (q.q - 1.0)) / (q.q - 1.0) + a


def validate_distribution(probs: Sequence[float]) -> Distribution:
    """Validate a raw probability sequence and wrap it as a Distribution.

    Raises EmptyError for an empty input, RangeError for entries outside
    [0, 1], and NormalizationError when the sum strays from 1 by more
    than ``NORMALIZATION_TOL``.
    """
    return Distribution(probs)
