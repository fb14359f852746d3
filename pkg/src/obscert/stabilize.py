"""Stabilizing control synthesis and decay-rate estimation.

Two constructive routes to exponential decay are provided.  The
concatenation route repeats a fixed-horizon minimal-norm steering step:
if every unit initial state can be driven into the ball of radius alpha
in time T with control norm at most C (that is, the weak observability
constant at (alpha, T) is finite), then chaining those controls period
after period contracts the state by alpha each period, for a decay rate
of ln(alpha)/T and total control energy at most C^2/(1-alpha^2) times the
initial energy.  The feedback route inverts an exponentially weighted
backward Gramian: K = -B' C_lambda^{-1} places the closed-loop spectrum
left of -lambda whenever the pair is exactly controllable, and combined
with the spectral shift A -> A + omega I it reaches any prescribed decay
rate for controllable pairs.

The best achievable decay rate is the infimum of ln(alpha)/T over the
(alpha, T) region where the weak constant is finite; ``sweep_omega_star``
reports a grid upper bound for it rather than pretending to compute the
infimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .exceptions import InvalidArgumentError, NotStabilizableError
from .gramian import (
    KERNEL_RTOL,
    Gramian,
    controllability_gramian,
    komornik_gramian,
)
from .minnorm import MinNormSolution, solve_min_norm
from .observability import weak_constant
from .systems import LinearSystem, kalman_decompose, semigroup, shift

__all__ = [
    "StabilizationPlan",
    "ConcatenationTrajectory",
    "DecayRateEstimate",
    "spectral_abscissa",
    "semigroup_sup_norm",
    "concatenation_plan",
    "run_concatenation",
    "komornik_feedback",
    "complete_stabilization_via_shift",
    "sweep_omega_star",
]


@dataclass(frozen=True, eq=False)
class StabilizationPlan:
    """Certificate of exponential stabilizability.

    ``kind`` is ``"concatenation"`` (open-loop schedule parameters alpha,
    period, per-step norm bound) or ``"feedback"`` (gain matrix).  For a
    concatenation plan ``certified_rate`` is ln(alpha)/period; for a
    feedback plan it is the measured spectral abscissa of A + B K.
    """

    kind: str
    certified_rate: float
    alpha: float | None = None
    period: float | None = None
    control_norm_bound: float | None = None
    feedback: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class ConcatenationTrajectory:
    """Sampled closed trajectory produced by :func:`run_concatenation`.

    ``states`` holds the state at every entry of ``times``; ``controls``
    has shape (steps, samples_per_period, m) with rows sampled at
    ``period_offsets`` within each period (the control jumps at period
    boundaries, so per-period storage avoids ambiguity there).
    ``period_norms[k]`` is ||y(k T)||, ``control_energy`` the exact total
    squared L^2 norm of the concatenated control, and ``measured_rate`` the
    largest per-period exponential rate max_k ln(||y(kT)||/||y0||)/(kT).
    """

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    period_offsets: np.ndarray
    period_norms: np.ndarray
    control_energy: float
    measured_rate: float
    solutions: list[MinNormSolution]


@dataclass(frozen=True, eq=False)
class DecayRateEstimate:
    """Grid upper bound on the best achievable decay rate.

    ``entries`` lists (alpha, T, mu) for every grid cell, with mu infinite
    where no certificate exists.  ``best_rate`` is the minimum of
    ln(alpha)/T over cells with finite mu (+inf when there is none) and
    ``best_entry`` the cell attaining it.  ``unbounded_below`` is a
    heuristic: it is set when ``best_rate`` has dropped below ``floor``,
    suggesting the true infimum is -inf; the principled test for that is
    whether mu stays bounded as alpha -> 0 at fixed T.
    """

    entries: list[tuple[float, float, float]]
    best_rate: float
    best_entry: tuple[float, float, float] | None
    unbounded_below: bool
    floor: float


def spectral_abscissa(M: np.ndarray) -> float:
    """Largest real part of the eigenvalues of ``M``."""
    return float(np.max(np.linalg.eigvals(M).real))


def semigroup_sup_norm(sys: LinearSystem, T: float, samples: int = 256) -> float:
    """max of ||exp(t A)|| over a uniform grid of [0, T] (includes t = 0)."""
    times = np.linspace(0.0, T, samples)
    return max(np.linalg.norm(semigroup(sys, t), 2) for t in times)


def concatenation_plan(
    sys: LinearSystem,
    alpha: float,
    T: float,
    rtol: float = KERNEL_RTOL,
    starts: int = 32,
    seed: int = 0,
) -> StabilizationPlan:
    """Certify exponential decay at rate ln(alpha)/T by repeated steering.

    Requires the weak observability constant at (alpha, T) to be finite;
    its value bounds the control norm of every steering step relative to
    the state norm at the start of the step.  A stable-enough free flow
    (||S(T)|| <= alpha) yields the zero-control plan with bound 0.
    """
    if not (0.0 < alpha < 1.0):
        raise InvalidArgumentError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not (math.isfinite(T) and T > 0):
        raise InvalidArgumentError(f"period must be positive and finite, got {T!r}")
    g = controllability_gramian(sys, T)
    report = weak_constant(sys, g, alpha, rtol=rtol, starts=starts, seed=seed)
    if not math.isfinite(report.value):
        raise NotStabilizableError(
            f"weak observability constant is infinite at alpha={alpha}, T={T}; "
            "no concatenation certificate exists at these parameters",
            direction=report.witness,
        )
    return StabilizationPlan(
        kind="concatenation",
        certified_rate=math.log(alpha) / T,
        alpha=alpha,
        period=T,
        control_norm_bound=report.value,
    )


def run_concatenation(
    sys: LinearSystem,
    plan: StabilizationPlan,
    y0: np.ndarray,
    steps: int,
    grid: int = 512,
) -> ConcatenationTrajectory:
    """Execute a concatenation plan for ``steps`` periods from ``y0``.

    Each period solves the minimal-norm steering problem afresh from the
    current state, so ||y(kT)|| <= alpha^k ||y0|| holds step by step and the
    total control energy is bounded by C^2/(1-alpha^2) ||y0||^2 with C the
    plan's per-step norm bound.  States are sampled by exact
    matrix-exponential stepping of the state/adjoint pair, which keeps
    ODE-solver error out of measured decay rates.
    """
    if plan.kind != "concatenation":
        raise InvalidArgumentError(f"plan kind must be 'concatenation', got {plan.kind!r}")
    if steps < 1:
        raise InvalidArgumentError(f"steps must be positive, got {steps}")
    if grid < 2:
        raise InvalidArgumentError(f"grid must have at least 2 points, got {grid}")
    y0 = np.asarray(y0, dtype=float).reshape(-1)
    T, alpha = plan.period, plan.alpha
    n, m = sys.n, sys.m
    g = controllability_gramian(sys, T)

    # One substep of the optimal pair is exact:
    #   y(t_{i+1}) = exp(h A) y(t_i) - G_h phi(t_{i+1}),
    # with G_h the Gramian over [0, h] and phi(t) = exp((T-t) A') psi the
    # adjoint, sampled along its own (stable) flow direction.
    h = T / (grid - 1)
    flow = semigroup(sys, h)
    g_step = controllability_gramian(sys, h).matrix
    adj_step = expm(h * sys.A.T)
    offsets = np.linspace(0.0, T, grid)

    times = [0.0]
    states = [y0]
    controls = np.empty((steps, grid, m))
    period_norms = [float(np.linalg.norm(y0))]
    solutions: list[MinNormSolution] = []
    energy = 0.0
    y = y0
    for k in range(steps):
        sol = solve_min_norm(sys, g, y, alpha, grid=grid)
        solutions.append(sol)
        controls[k] = sol.control
        energy += sol.control_norm**2
        phis = np.empty((grid, n))
        phi = sol.adjoint
        for j in range(grid):
            phis[grid - 1 - j] = phi
            if j < grid - 1:
                phi = adj_step @ phi
        state = y
        for i in range(1, grid):
            state = flow @ state - g_step @ phis[i]
            times.append(k * T + offsets[i])
            states.append(state)
        y = sol.terminal_state
        period_norms.append(float(np.linalg.norm(y)))

    base = period_norms[0]
    rate = -math.inf
    for k in range(1, steps + 1):
        if period_norms[k] > 0.0 and base > 0.0:
            rate = max(rate, math.log(period_norms[k] / base) / (k * T))
    return ConcatenationTrajectory(
        times=np.array(times),
        states=np.array(states),
        controls=controls,
        period_offsets=offsets,
        period_norms=np.array(period_norms),
        control_energy=energy,
        measured_rate=rate,
        solutions=solutions,
    )


def komornik_feedback(
    sys: LinearSystem, T: float, lam: float, rtol: float = KERNEL_RTOL
) -> StabilizationPlan:
    """Feedback K = -B' C_lambda^{-1} from the weighted backward Gramian.

    Requires exact controllability (the weighted Gramian must be
    invertible); the closed loop A + B K then decays at rate -lam or
    faster, and v -> <v, C_lambda^{-1} v> is a Lyapunov function for it.

    Controllability is decided by the Kalman decomposition rather than by
    thresholding the Gramian spectrum: single-input pairs routinely give a
    severely ill-conditioned (yet invertible) weighted Gramian, and the
    rate guarantee tolerates that, whereas a genuinely uncontrollable pair
    makes it exactly singular.
    """
    decomp = kalman_decompose(sys, rtol=rtol)
    if decomp.rank < sys.n:
        raise NotStabilizableError(
            f"pair is not exactly controllable (rank {decomp.rank} < {sys.n}); "
            "the weighted Gramian is singular and no rapid feedback exists",
            direction=decomp.basis[:, decomp.rank],
        )
    C = komornik_gramian(sys, T, lam)
    if C.eigenvalues[-1] <= 1e3 * np.finfo(float).eps * C.eigenvalues[0]:
        raise NotStabilizableError(
            "weighted Gramian is numerically singular beyond double-precision "
            "invertibility; cannot form the rapid feedback",
            direction=C.eigenvectors[:, -1],
        )
    gain = -np.linalg.solve(C.matrix, sys.B).T
    rate = spectral_abscissa(sys.A + sys.B @ gain)
    if rate > -lam + 1e-3:
        raise RuntimeError(
            f"closed-loop abscissa {rate:.6g} misses the guaranteed rate {-lam:.6g}; "
            "the weighted Gramian is too ill-conditioned at these parameters"
        )
    return StabilizationPlan(kind="feedback", certified_rate=rate, feedback=gain)


def complete_stabilization_via_shift(
    sys: LinearSystem,
    omega_target: float,
    T: float,
    lam: float = 1.0,
    rtol: float = KERNEL_RTOL,
) -> StabilizationPlan:
    """Feedback meeting any prescribed decay rate, for controllable pairs.

    Exact controllability survives the substitution A -> A + omega I (the
    flow picks up the scalar factor exp(omega t)), so a rapid feedback for
    the shifted system with omega = -omega_target decays at rate
    omega_target - lam once applied to the original system.
    """
    if not (math.isfinite(omega_target) and omega_target < 0):
        raise InvalidArgumentError(f"target rate must be negative, got {omega_target!r}")
    decomp = kalman_decompose(sys, rtol=rtol)
    if decomp.rank < sys.n:
        raise NotStabilizableError(
            f"pair is not controllable (rank {decomp.rank} < {sys.n}); complete "
            "stabilization via the shifted system is unavailable",
            direction=decomp.basis[:, decomp.rank],
        )
    shifted_plan = komornik_feedback(shift(sys, -omega_target), T, lam, rtol=rtol)
    gain = shifted_plan.feedback
    rate = spectral_abscissa(sys.A + sys.B @ gain)
    if rate > omega_target + 1e-3:
        raise RuntimeError(
            f"closed-loop abscissa {rate:.6g} misses the target {omega_target:.6g}"
        )
    return StabilizationPlan(kind="feedback", certified_rate=rate, feedback=gain)


def sweep_omega_star(
    sys: LinearSystem,
    alpha_grid,
    T_grid,
    floor: float = -20.0,
    rtol: float = KERNEL_RTOL,
    starts: int = 32,
    seed: int = 0,
) -> DecayRateEstimate:
    """Evaluate the weak constant on a product grid and bound the best rate.

    Returns the minimum of ln(alpha)/T over grid cells with a finite weak
    constant.  This is an upper bound for the true best rate (an infimum
    over the continuum, not computable exactly); ``unbounded_below`` flags
    a minimum below ``floor`` as heuristic evidence of complete
    stabilizability.
    """
    alpha_grid = [float(a) for a in alpha_grid]
    T_grid = [float(t) for t in T_grid]
    if not alpha_grid or not T_grid:
        raise InvalidArgumentError("alpha and T grids must be nonempty")
    if any(not (0.0 < a < 1.0) for a in alpha_grid):
        raise InvalidArgumentError("alpha grid values must lie in (0, 1)")
    if any(not (math.isfinite(t) and t > 0.0) for t in T_grid):
        raise InvalidArgumentError("T grid values must be positive")

    entries: list[tuple[float, float, float]] = []
    best_rate = math.inf
    best_entry: tuple[float, float, float] | None = None
    for T in T_grid:
        g = controllability_gramian(sys, T)
        for alpha in alpha_grid:
            mu = weak_constant(sys, g, alpha, rtol=rtol, starts=starts, seed=seed).value
            entries.append((alpha, T, mu))
            if math.isfinite(mu):
                rate = math.log(alpha) / T
                if rate < best_rate:
                    best_rate = rate
                    best_entry = (alpha, T, mu)
    return DecayRateEstimate(
        entries=entries,
        best_rate=best_rate,
        best_entry=best_entry,
        unbounded_below=best_rate < floor,
        floor=floor,
    )
