"""Minimal-norm steering into a target ball, solved through convex duality.

Given an initial state y0, a horizon T, and a contraction factor alpha,
the primal problem minimizes (1/2)||u||^2 in L^2(0, T) subject to the
terminal constraint ||y(T; y0, u)|| <= alpha ||y0||.  Its dual minimizes

    J(psi) = (1/2) <G_T psi, psi> - <psi, S(T) y0> + alpha ||y0|| ||psi||

over adjoint states psi.  When the optimal control is nonzero the dual
minimizer psi_bar = r_bar * sigma_bar satisfies the stationarity equation

    G_T psi_bar - S(T) y0 + alpha ||y0|| sigma_bar = 0,

with sigma_bar = (r_bar G_T + alpha ||y0|| I)^{-1} S(T) y0 of unit norm.
Since the map r -> ||(r G_T + alpha ||y0|| I)^{-1} S(T) y0|| is strictly
decreasing, r_bar is found by bisection.  The optimal control is the
observed adjoint flow u(t) = -B' exp((T-t) A') psi_bar; its L^2 norm mu
satisfies mu^2 = <G_T psi_bar, psi_bar> and the optimal cost equals
mu^2 / 2, while the terminal state lands on the boundary of the target
ball.  The alpha = 0 case (exact steering to the origin) bypasses the
radial step and solves G_T psi_bar = S(T) y0 on the range of the Gramian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .exceptions import InfeasibleError, InvalidArgumentError
from .gramian import KERNEL_RTOL, Gramian
from .systems import LinearSystem, semigroup

__all__ = [
    "MinNormSolution",
    "solve_min_norm",
    "dual_objective",
    "radial_profile",
]

_MAX_BRACKET_DOUBLINGS = 400


@dataclass(frozen=True, eq=False)
class MinNormSolution:
    """Solution bundle of one minimal-norm steering problem.

    ``adjoint`` is the dual minimizer (zero when no control is needed),
    ``adjoint_norm`` its Euclidean norm, and ``direction`` its unit
    direction (``None`` for the zero solution).  ``control`` samples the
    optimal control on the uniform grid ``times`` (rows are time points,
    columns input channels). ``control_norm`` is the exact L^2 norm of the
    continuous-time control and ``cost`` the optimal value
    ``control_norm**2 / 2``.
    """

    y0: np.ndarray
    alpha: float
    horizon: float
    adjoint: np.ndarray
    adjoint_norm: float
    direction: np.ndarray | None
    control_norm: float
    cost: float
    times: np.ndarray
    control: np.ndarray
    terminal_state: np.ndarray


def _sample_adjoint_control(
    sys: LinearSystem, psi: np.ndarray, T: float, grid: int
) -> tuple[np.ndarray, np.ndarray]:
    """Sample u(t) = -B' exp((T-t) A') psi on a uniform grid of ``grid`` points.

    The adjoint is propagated in increasing T-t (from psi at t = T back to
    t = 0), which follows the flow of A' itself; stepping the other way
    would amplify roundoff exponentially whenever A has strongly stable
    modes.
    """
    times = np.linspace(0.0, T, grid)
    step = expm((T / (grid - 1)) * sys.A.T)
    control = np.empty((grid, sys.m))
    phi = np.array(psi, dtype=float)
    for j in range(grid):
        control[grid - 1 - j] = -(sys.B.T @ phi)
        if j < grid - 1:
            phi = step @ phi
    return times, control


def solve_min_norm(
    sys: LinearSystem,
    g: Gramian,
    y0: np.ndarray,
    alpha: float,
    grid: int = 512,
    rtol: float = KERNEL_RTOL,
) -> MinNormSolution:
    """Steer y0 into the ball of radius alpha*||y0|| with least control energy.

    Parameters
    ----------
    sys, g : the system and its Gramian over the horizon of interest.
    y0 : initial state.
    alpha : target contraction factor, >= 0.  Zero requests exact steering
        to the origin and is solved with the Gramian pseudo-inverse.
    grid : number of uniform sample points for the reported control.
    rtol : relative eigenvalue threshold for the Gramian kernel split.

    Raises
    ------
    InfeasibleError
        If the propagated state has a Gramian-kernel component that the
        target ball cannot absorb; the obstructing unit direction is
        attached to the exception.
    """
    if not (math.isfinite(alpha) and alpha >= 0):
        raise InvalidArgumentError(f"alpha must be nonnegative and finite, got {alpha!r}")
    if grid < 2:
        raise InvalidArgumentError(f"grid must have at least 2 points, got {grid}")
    y0 = np.asarray(y0, dtype=float).reshape(-1)
    if y0.shape[0] != sys.n:
        raise InvalidArgumentError(f"y0 must have length {sys.n}, got {y0.shape[0]}")
    if not np.all(np.isfinite(y0)):
        raise InvalidArgumentError("y0 must be finite")

    T = g.horizon
    S = semigroup(sys, T)
    v = S @ y0
    radius = alpha * np.linalg.norm(y0)

    if np.linalg.norm(v) <= radius:
        times = np.linspace(0.0, T, grid)
        return MinNormSolution(
            y0=y0,
            alpha=alpha,
            horizon=T,
            adjoint=np.zeros(sys.n),
            adjoint_norm=0.0,
            direction=None,
            control_norm=0.0,
            cost=0.0,
            times=times,
            control=np.zeros((grid, sys.m)),
            terminal_state=v,
        )

    lam = g.eigenvalues
    V = g.eigenvectors
    rank = g.rank(rtol)
    coeff = V.T @ v
    kernel_norm = float(np.linalg.norm(coeff[rank:]))

    if alpha == 0.0:
        if kernel_norm > rtol * np.linalg.norm(v):
            obstruction = V[:, rank:] @ coeff[rank:]
            raise InfeasibleError(
                "S(T) y0 lies outside the numerical range of the Gramian; exact "
                f"steering to the origin is infeasible (kernel component {kernel_norm:.3e})",
                direction=obstruction / kernel_norm,
            )
        psi = V[:, :rank] @ (coeff[:rank] / lam[:rank])
    else:
        if kernel_norm >= radius:
            obstruction = V[:, rank:] @ coeff[rank:]
            raise InfeasibleError(
                f"kernel component {kernel_norm:.3e} of S(T) y0 exceeds the target "
                f"radius {radius:.3e}; the steering cost is infinite along y0",
                direction=obstruction / kernel_norm,
            )

        def direction_norm(r: float) -> float:
            return float(np.linalg.norm(coeff / (r * lam + radius)))

        hi = 1.0
        doublings = 0
        while direction_norm(hi) >= 1.0:
            hi *= 2.0
            doublings += 1
            if doublings > _MAX_BRACKET_DOUBLINGS:
                obstruction = V[:, rank:] @ coeff[rank:]
                raise InfeasibleError(
                    "bisection bracket did not close: the kernel component of "
                    "S(T) y0 sits on the target-ball boundary",
                    direction=obstruction / kernel_norm if kernel_norm > 0 else None,
                )
        lo = 0.0
        while hi - lo > 1e-12 * hi:
            mid = 0.5 * (lo + hi)
            if direction_norm(mid) >= 1.0:
                lo = mid
            else:
                hi = mid
        r = 0.5 * (lo + hi)
        sigma = V @ (coeff / (r * lam + radius))
        psi = r * sigma

    adjoint_norm = float(np.linalg.norm(psi))
    direction = psi / adjoint_norm if adjoint_norm > 0 else None
    mu = float(math.sqrt(max(float(np.dot(V.T @ psi, lam * (V.T @ psi))), 0.0)))
    times, control = _sample_adjoint_control(sys, psi, T, grid)
    terminal = v - g.matrix @ psi
    return MinNormSolution(
        y0=y0,
        alpha=alpha,
        horizon=T,
        adjoint=psi,
        adjoint_norm=adjoint_norm,
        direction=direction,
        control_norm=mu,
        cost=0.5 * mu * mu,
        times=times,
        control=control,
        terminal_state=terminal,
    )


def dual_objective(
    sys: LinearSystem, g: Gramian, y0: np.ndarray, alpha: float, psi: np.ndarray
) -> float:
    """Dual functional (1/2)<G psi, psi> - <psi, S(T) y0> + alpha ||y0|| ||psi||."""
    if not (math.isfinite(alpha) and alpha >= 0):
        raise InvalidArgumentError(f"alpha must be nonnegative and finite, got {alpha!r}")
    y0 = np.asarray(y0, dtype=float).reshape(-1)
    psi = np.asarray(psi, dtype=float).reshape(-1)
    v = semigroup(sys, g.horizon) @ y0
    return float(
        0.5 * psi @ (g.matrix @ psi)
        - psi @ v
        + alpha * np.linalg.norm(y0) * np.linalg.norm(psi)
    )


def radial_profile(
    sys: LinearSystem,
    g: Gramian,
    y0: np.ndarray,
    alpha: float,
    sigma: np.ndarray,
    rtol: float = KERNEL_RTOL,
) -> float:
    """Infimum of the dual functional along the ray r * sigma, r > 0.

    With a = (1/2)<G sigma, sigma> and b = <sigma, S(T) y0> - alpha ||y0||
    the infimum is 0 when b <= 0, -b^2/(4a) when a > 0 < b (attained at
    r = b/(2a)), and -inf when sigma lies in the Gramian kernel with b > 0.
    The kernel decision uses the same relative threshold as the rest of the
    package: a counts as zero when <G sigma, sigma> <= rtol * lambda_max.
    """
    sigma = np.asarray(sigma, dtype=float).reshape(-1)
    if abs(np.linalg.norm(sigma) - 1.0) > 1e-8:
        raise InvalidArgumentError("sigma must be a unit vector")
    y0 = np.asarray(y0, dtype=float).reshape(-1)
    v = semigroup(sys, g.horizon) @ y0
    quad = float(np.linalg.norm(g.sqrt @ sigma) ** 2)
    b = float(sigma @ v - alpha * np.linalg.norm(y0))
    if b <= 0.0:
        return 0.0
    if quad <= g.eigenvalues[0] * rtol:
        return -math.inf
    return -(b * b) / (4.0 * 0.5 * quad)
