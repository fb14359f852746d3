"""Observability-constant certificates for linear control systems.

Computes the constants that quantify exact, null, approximate, and
ball-targeted controllability of ``y' = A y + B u``, synthesizes the
minimal-norm control steering an initial state into a contraction ball via
convex duality, and builds exponentially stabilizing open-loop schedules
and feedback gains with certified decay rates.
"""

from .exceptions import (
    InfeasibleError,
    InvalidArgumentError,
    NotStabilizableError,
    SystemFileError,
)
from .gramian import (
    KERNEL_RTOL,
    Gramian,
    controllability_gramian,
    gramian_by_quadrature,
    komornik_gramian,
)
from .minnorm import MinNormSolution, dual_objective, radial_profile, solve_min_norm
from .observability import (
    ObservabilityReport,
    exact_controllability_constant,
    null_controllability_constant,
    weak_constant,
    weak_constant_oracle,
)
from .stabilize import (
    ConcatenationTrajectory,
    DecayRateEstimate,
    StabilizationPlan,
    complete_stabilization_via_shift,
    concatenation_plan,
    komornik_feedback,
    run_concatenation,
    semigroup_sup_norm,
    spectral_abscissa,
    sweep_omega_star,
)
from .systems import (
    BUILTIN_SYSTEMS,
    KalmanDecomposition,
    LinearSystem,
    builtin_system,
    kalman_decompose,
    make_wave_heat,
    parse_system_file,
    semigroup,
    shift,
    write_system_file,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_SYSTEMS",
    "ConcatenationTrajectory",
    "DecayRateEstimate",
    "Gramian",
    "InfeasibleError",
    "InvalidArgumentError",
    "KERNEL_RTOL",
    "KalmanDecomposition",
    "LinearSystem",
    "MinNormSolution",
    "NotStabilizableError",
    "ObservabilityReport",
    "StabilizationPlan",
    "SystemFileError",
    "builtin_system",
    "complete_stabilization_via_shift",
    "concatenation_plan",
    "controllability_gramian",
    "dual_objective",
    "exact_controllability_constant",
    "gramian_by_quadrature",
    "kalman_decompose",
    "komornik_feedback",
    "komornik_gramian",
    "make_wave_heat",
    "null_controllability_constant",
    "parse_system_file",
    "radial_profile",
    "run_concatenation",
    "semigroup",
    "semigroup_sup_norm",
    "shift",
    "solve_min_norm",
    "spectral_abscissa",
    "sweep_omega_star",
    "weak_constant",
    "weak_constant_oracle",
    "write_system_file",
]
