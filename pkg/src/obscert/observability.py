"""Observability constants certifying controllability and stabilizability.

Three constants of a pair (system, Gramian over [0, T]) are computed here,
each the smallest C for which an inequality holds for all adjoint states
psi (with ||G^{1/2} psi|| the observed-trajectory norm):

* exact controllability:   ||psi||        <= C ||G^{1/2} psi||
* null controllability:    ||S(T)' psi||  <= C ||G^{1/2} psi||
* weak (alpha > 0):        ||S(T)' psi||  <= C ||G^{1/2} psi|| + alpha ||psi||

The first two reduce to eigenvalue problems.  The weak constant is the
supremum of a nonconvex ratio on the unit sphere; it is computed by
multi-start local ascent with spectral warm starts and is therefore a
certified lower bound whose tightness is validated by the brute-force
sphere oracle in low dimension.  Values may be infinite; finiteness is
always decided first by a largest-singular-value test on the Gramian
kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from .exceptions import InvalidArgumentError
from .gramian import KERNEL_RTOL, Gramian
from .systems import LinearSystem, semigroup

__all__ = [
    "ObservabilityReport",
    "exact_controllability_constant",
    "null_controllability_constant",
    "weak_constant",
    "weak_constant_oracle",
]


@dataclass(frozen=True, eq=False)
class ObservabilityReport:
    """Value of one observability constant together with its witness.

    ``value`` may be ``math.inf``.  ``witness`` is a unit vector achieving
    (or, for infinite values, exhibiting) the supremum: for infinite values
    it is a Gramian-kernel direction that the inequality cannot control.
    ``method`` tags the solver path: ``spectral`` for eigenvalue reductions,
    ``optimized`` for multi-start ascent, ``oracle`` for sphere sampling.
    ``alpha`` is zero for the exact/null controllability constants.
    """

    horizon: float
    alpha: float
    value: float
    witness: np.ndarray
    method: str


def _unit(v: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(v)
    return v / nrm if nrm > 0 else v


def exact_controllability_constant(g: Gramian, rtol: float = KERNEL_RTOL) -> ObservabilityReport:
    """Smallest C with ||psi|| <= C ||G^{1/2} psi||, i.e. 1/sqrt(lambda_min).

    Infinite when the Gramian is rank deficient at the relative threshold
    ``rtol`` (the pair is not exactly controllable on this horizon); the
    witness is then an uncontrolled direction.
    """
    lam = g.eigenvalues
    witness = _unit(g.eigenvectors[:, -1])
    if lam[0] > 0.0 and lam[-1] > rtol * lam[0]:
        value = 1.0 / math.sqrt(lam[-1])
    else:
        value = math.inf
    return ObservabilityReport(g.horizon, 0.0, value, witness, "spectral")


def null_controllability_constant(
    sys: LinearSystem, g: Gramian, rtol: float = KERNEL_RTOL
) -> ObservabilityReport:
    """Smallest C with ||S(T)' psi|| <= C ||G^{1/2} psi||.

    Restricted to the numerical range of the Gramian this is the largest
    eigenvalue of the pencil (S(T) S(T)', G): with W the pseudo square root
    inverse, the value is sqrt(lambda_max(W S S' W)).  Infinite when S(T)'
    moves some Gramian-kernel direction, detected by the largest singular
    value of S(T)' on the kernel.
    """
    S = semigroup(sys, g.horizon)
    s_norm = np.linalg.norm(S, 2)
    kernel = g.kernel(rtol)
    if kernel.shape[1]:
        U, svals, Vt = np.linalg.svd(S.T @ kernel)
        if svals[0] > rtol * s_norm:
            witness = _unit(kernel @ Vt[0])
            return ObservabilityReport(g.horizon, 0.0, math.inf, witness, "spectral")
    W = g.sqrt_pinv(rtol)
    pencil = W @ (S @ S.T) @ W
    lam, V = np.linalg.eigh(0.5 * (pencil + pencil.T))
    witness = _unit(W @ V[:, -1])
    return ObservabilityReport(g.horizon, 0.0, math.sqrt(max(lam[-1], 0.0)), witness, "spectral")


def _sphere_points(count: int, dim: int, seed: int) -> np.ndarray:
    """Low-discrepancy points on the unit sphere, rows of shape (count, dim)."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    sampler = qmc.Halton(d=dim, seed=seed)
    raw = sampler.random(count)
    # Map the low-discrepancy cube through the normal quantile, then radially.
    from scipy.stats import norm

    gauss = norm.ppf(np.clip(raw, 1e-12, 1.0 - 1e-12))
    norms = np.linalg.norm(gauss, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return gauss / norms


def _ratio_terms(psi: np.ndarray, M: np.ndarray, root: np.ndarray, alpha: float):
    den = np.linalg.norm(root @ psi)
    num = np.linalg.norm(M @ psi) - alpha * np.linalg.norm(psi)
    return num, den


def _maximize_ratio(
    M: np.ndarray,
    g: Gramian,
    alpha: float,
    rtol: float,
    starts: int,
    seed: int,
) -> tuple[float, np.ndarray]:
    """Multi-start BFGS ascent of (||M psi|| - alpha ||psi||) / ||G^{1/2} psi||.

    The ratio is scale invariant, so a soft unit-norm penalty pins the
    iterates to the sphere without constraining the solver; stationary
    points of the penalized objective are exactly sphere-stationary points
    of the ratio.
    """
    n = M.shape[0]
    root = g.sqrt
    Gc = root @ root
    den_floor = 1e-14 * max(g.eigenvalues[0], 1.0)

    def objective(x: np.ndarray):
        nx = np.linalg.norm(x)
        obs = root @ x
        den = np.linalg.norm(obs)
        if den <= den_floor or nx == 0.0:
            return 1e30, np.zeros_like(x)
        Mx = M @ x
        nMx = np.linalg.norm(Mx)
        num = nMx - alpha * nx
        grad_num = (M.T @ Mx) / nMx - (alpha / nx) * x
        grad_den = (Gc @ x) / den
        ratio = num / den
        grad_ratio = (grad_num - ratio * grad_den) / den
        pen = nx * nx - 1.0
        return -ratio + pen * pen, -grad_ratio + 4.0 * pen * x

    # Warm starts: top singular directions of the propagator, the pencil
    # maximizer, kernel/range mixtures, a Halton scan, and random vectors.
    starts_list: list[np.ndarray] = []
    _, _, Vt = np.linalg.svd(M)
    for k in range(min(n, 4)):
        starts_list.append(Vt[k])
    W = g.sqrt_pinv(rtol)
    pencil = W @ (M.T @ M) @ W
    _, Vp = np.linalg.eigh(0.5 * (pencil + pencil.T))
    pencil_dir = W @ Vp[:, -1]
    if np.linalg.norm(pencil_dir) > 0:
        starts_list.append(_unit(pencil_dir))
    kernel = g.kernel(rtol)
    range_top = g.eigenvectors[:, 0]
    for j in range(kernel.shape[1]):
        starts_list.append(_unit(kernel[:, j] + 1e-2 * range_top))
    rng = np.random.default_rng(seed)
    for _ in range(starts):
        starts_list.append(_unit(rng.standard_normal(n)))
    scan = _sphere_points(256, n, seed=seed)
    scan_vals = _ratio_values(scan, M, root, alpha)
    starts_list.append(scan[int(np.argmax(scan_vals))])

    best_val = -math.inf
    best_psi = starts_list[0]
    for x0 in starts_list:
        f0, _ = objective(x0)
        if -f0 > best_val and f0 < 1e29:
            best_val, best_psi = -f0, _unit(x0)
        res = optimize.minimize(
            objective, x0, jac=True, method="BFGS", options={"gtol": 1e-12, "maxiter": 400}
        )
        x = res.x
        nx = np.linalg.norm(x)
        if not np.all(np.isfinite(x)) or nx == 0.0:
            continue
        psi = x / nx
        num, den = _ratio_terms(psi, M, root, alpha)
        if den > den_floor and num / den > best_val:
            best_val, best_psi = num / den, psi
    return best_val, best_psi


def _ratio_values(points: np.ndarray, M: np.ndarray, root: np.ndarray, alpha: float) -> np.ndarray:
    """Vectorized ratio over unit rows; +inf where the kernel sees growth."""
    num = np.linalg.norm(points @ M.T, axis=1) - alpha
    den = np.linalg.norm(points @ root.T, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(den > 0.0, np.maximum(num, 0.0) / np.where(den > 0.0, den, 1.0), 0.0)
    vals = np.where((den == 0.0) & (num > 0.0), np.inf, vals)
    return vals


def weak_constant(
    sys: LinearSystem,
    g: Gramian,
    alpha: float,
    rtol: float = KERNEL_RTOL,
    starts: int = 32,
    seed: int = 0,
) -> ObservabilityReport:
    """Smallest C with ||S(T)' psi|| <= C ||G^{1/2} psi|| + alpha ||psi||.

    Equivalently the supremum over unit psi of
    max(||S(T)' psi|| - alpha, 0) / ||G^{1/2} psi||.  The value is zero
    exactly when alpha >= ||S(T)||, and infinite exactly when some
    Gramian-kernel direction satisfies ||S(T)' psi|| > alpha (decided by a
    largest-singular-value computation before any optimization).  Finite
    positive values come from seeded multi-start ascent, so they are
    certified lower bounds with heuristic tightness; the ``method`` tag
    records this.
    """
    if not (math.isfinite(alpha) and alpha > 0):
        raise InvalidArgumentError(f"alpha must be positive and finite, got {alpha!r}")
    S = semigroup(sys, g.horizon)
    M = S.T
    s_norm = np.linalg.norm(S, 2)
    if alpha >= s_norm:
        _, _, Vt = np.linalg.svd(M)
        return ObservabilityReport(g.horizon, alpha, 0.0, Vt[0], "spectral")
    kernel = g.kernel(rtol)
    if kernel.shape[1]:
        _, svals, Vt = np.linalg.svd(M @ kernel)
        if svals[0] > alpha:
            witness = _unit(kernel @ Vt[0])
            return ObservabilityReport(g.horizon, alpha, math.inf, witness, "spectral")
    value, witness = _maximize_ratio(M, g, alpha, rtol, starts, seed)
    return ObservabilityReport(g.horizon, alpha, max(value, 0.0), witness, "optimized")


def weak_constant_oracle(
    sys: LinearSystem,
    g: Gramian,
    alpha: float,
    samples: int,
    seed: int = 0,
) -> ObservabilityReport:
    """Brute-force lower bound on the weak constant by sphere sampling.

    Evaluates the ratio at ``samples`` low-discrepancy unit vectors plus
    all coordinate directions and returns the maximum.  Independent of the
    ascent path used by :func:`weak_constant`; intended for dimensions up
    to about six.
    """
    if not (math.isfinite(alpha) and alpha > 0):
        raise InvalidArgumentError(f"alpha must be positive and finite, got {alpha!r}")
    if samples < 1:
        raise InvalidArgumentError(f"samples must be positive, got {samples}")
    S = semigroup(sys, g.horizon)
    M = S.T
    n = g.n
    points = np.vstack([_sphere_points(samples, n, seed), np.eye(n), -np.eye(n)])
    vals = _ratio_values(points, M, g.sqrt, alpha)
    idx = int(np.argmax(vals))
    return ObservabilityReport(g.horizon, alpha, float(vals[idx]), points[idx], "oracle")
