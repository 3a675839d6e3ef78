"""qentropy: self-normalizing q-exponential distributions and their entropy.

The package covers four pieces that fit together:

* ``core`` -- the deformed exponential [1 - (q-1)x]^(1/(q-1)), its
  inverse, and the QParam / Spectrum / Distribution value types;
* ``shift`` -- solving f(a0) = 1 so the distribution normalizes itself,
  including the exact existence test for q > 1;
* ``entropy`` -- the uncertainty measure (1 - sum p^q)/(q(q-1)), its
  Boltzmann-Gibbs and Tsallis baselines, the non-additive composition
  law, and figure-ready sweeps;
* ``maxent`` -- the Lagrange-multiplier reconstruction of the same
  distribution, beta inversion against a target mean energy, and the
  contrasting self-referential escort fixed point.
"""

from .core import (
    Distribution,
    Mode,
    QParam,
    QRegime,
    Spectrum,
    inverse_q_factor,
    q_factor,
    validate_distribution,
)
from .entropy import (
    CompositionResult,
    SweepTable,
    bg_entropy,
    compose,
    max_uncertainty,
    tsallis_entropy,
    two_state_sweep,
    uncertainty,
    varentropy_residual,
)
from .errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    EmptyError,
    InfeasibleError,
    NonConvergenceError,
    NormalizationError,
    QentropyError,
    RangeError,
    SingularityError,
    StepError,
)
from .maxent import (
    EscortSolution,
    LagrangeParams,
    alpha_from_shift,
    escort_distribution,
    lagrange_distribution,
    maxent_distribution,
    mean_energy,
    shift_from_alpha,
    solve_beta,
    stationarity_residual,
)
from .shift import (
    FeasibilityReport,
    ShiftSolution,
    SolveMethod,
    domain_interval,
    feasibility,
    partition_derivative,
    partition_value,
    shifted_distribution,
    solve_shift,
)

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "CompositionResult",
    "ConvergenceError",
    "Distribution",
    "DomainError",
    "EmptyError",
    "EscortSolution",
    "FeasibilityReport",
    "InfeasibleError",
    "LagrangeParams",
    "Mode",
    "NonConvergenceError",
    "NormalizationError",
    "QParam",
    "QRegime",
    "QentropyError",
    "RangeError",
    "ShiftSolution",
    "SingularityError",
    "SolveMethod",
    "Spectrum",
    "StepError",
    "SweepTable",
    "alpha_from_shift",
    "bg_entropy",
    "compose",
    "domain_interval",
    "escort_distribution",
    "feasibility",
    "inverse_q_factor",
    "lagrange_distribution",
    "max_uncertainty",
    "maxent_distribution",
    "mean_energy",
    "partition_derivative",
    "partition_value",
    "q_factor",
    "shift_from_alpha",
    "shifted_distribution",
    "solve_beta",
    "solve_shift",
    "stationarity_residual",
    "tsallis_entropy",
    "two_state_sweep",
    "uncertainty",
    "validate_distribution",
    "varentropy_residual",
]
