"""Controllability Gramians and the exponentially weighted backward variant.

The Gramian of (A, B) over [0, T] is

    G_T = int_0^T exp((T-t) A) B B' exp((T-t) A') dt,

a symmetric positive semidefinite matrix whose quadratic form equals the
squared L^2 norm of the observed adjoint trajectory:
<G_T psi, psi> = int_0^T ||B' exp((T-t) A') psi||^2 dt.  That identity is
what links the Gramian spectrum to every observability constant computed
elsewhere in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import expm

from .exceptions import InvalidArgumentError
from .systems import LinearSystem

__all__ = [
    "Gramian",
    "controllability_gramian",
    "gramian_by_quadrature",
    "komornik_gramian",
]

#: Relative eigenvalue threshold separating the numerical range of a Gramian
#: from its numerical kernel.
KERNEL_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class Gramian:
    """Symmetric PSD matrix with cached spectral data.

    ``matrix`` is symmetrized on construction; ``eigenvalues`` are clamped
    to be nonnegative (tiny negative values are eigensolver roundoff) and
    sorted in nonincreasing order, with ``eigenvectors`` as the matching
    columns.  ``sqrt`` is the symmetric PSD square root.
    """

    horizon: float
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sqrt: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def rank(self, rtol: float = KERNEL_RTOL) -> int:
        """Number of eigenvalues above ``rtol`` times the largest one."""
        top = self.eigenvalues[0]
        if top <= 0.0:
            return 0
        return int(np.sum(self.eigenvalues > rtol * top))

    def kernel(self, rtol: float = KERNEL_RTOL) -> np.ndarray:
        """Orthonormal basis (columns) of the numerical kernel."""
        return self.eigenvectors[:, self.rank(rtol):]

    def range_basis(self, rtol: float = KERNEL_RTOL) -> np.ndarray:
        """Orthonormal basis (columns) of the numerical range."""
        return self.eigenvectors[:, : self.rank(rtol)]

    def sqrt_pinv(self, rtol: float = KERNEL_RTOL) -> np.ndarray:
        """Pseudo-inverse of the square root, zero on the numerical kernel."""
        r = self.rank(rtol)
        V = self.eigenvectors[:, :r]
        return (V / np.sqrt(self.eigenvalues[:r])) @ V.T if r else np.zeros_like(self.matrix)

    def pinv(self, rtol: float = KERNEL_RTOL) -> np.ndarray:
        """Pseudo-inverse, zero on the numerical kernel."""
        r = self.rank(rtol)
        V = self.eigenvectors[:, :r]
        return (V / self.eigenvalues[:r]) @ V.T if r else np.zeros_like(self.matrix)


def _from_matrix(G: np.ndarray, horizon: float) -> Gramian:
    G = 0.5 * (G + G.T)
    lam, V = np.linalg.eigh(G)
    lam = np.clip(lam[::-1], 0.0, None)
    V = V[:, ::-1]
    root = (V * np.sqrt(lam)) @ V.T
    return Gramian(
        horizon=float(horizon),
        matrix=G,
        eigenvalues=lam,
        eigenvectors=V,
        sqrt=0.5 * (root + root.T),
    )


def controllability_gramian(sys: LinearSystem, T: float) -> Gramian:
    """Gramian over [0, T] via the block matrix exponential.

    Exponentiating tau * [[-A, B B'], [0, A']] produces exp(-tau A) times
    the integral in its upper-right block and exp(tau A') in the
    lower-right block, so the Gramian over [0, tau] assembles from the two
    without any quadrature step.  Because exp(-tau A) genuinely overflows
    for stiff stable systems, tau is halved until ||A|| tau is modest and
    the result is carried to the full horizon with the exact doubling
    identity G_{2t} = G_t + exp(t A) G_t exp(t A)'; every intermediate is
    then bounded by the final Gramian and flow.  The only error source is
    the matrix exponential itself.
    """
    if not (math.isfinite(T) and T > 0):
        raise InvalidArgumentError(f"horizon must be positive and finite, got {T!r}")
    A, B = sys.A, sys.B
    n = sys.n
    scale = np.linalg.norm(A, 2) * T
    doublings = max(0, int(math.ceil(math.log2(scale / 2.0)))) if scale > 2.0 else 0
    tau = T / 2**doublings
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = -A
    block[:n, n:] = B @ B.T
    block[n:, n:] = A.T
    E = expm(tau * block)
    # E[n:, n:] = exp(tau A'); its transpose premultiplies the upper-right block.
    flow = E[n:, n:].T
    G = flow @ E[:n, n:]
    G = 0.5 * (G + G.T)
    for _ in range(doublings):
        G = G + flow @ G @ flow.T
        G = 0.5 * (G + G.T)
        flow = flow @ flow
    return _from_matrix(G, T)


def _gauss_panels(lo: float, hi: float, panels: int, order: int):
    """Gauss-Legendre nodes and weights tiled over equal panels of [lo, hi]."""
    x, w = leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def gramian_by_quadrature(
    sys: LinearSystem, T: float, panels: int | None = None, order: int = 16
) -> Gramian:
    """Gramian by composite Gauss-Legendre quadrature of the integrand.

    Serves as an independent cross-check of the block-exponential route;
    the default panel count grows with ``||A|| T`` so the quadrature error
    stays far below the agreement tolerances used in tests.
    """
    if not (math.isfinite(T) and T > 0):
        raise InvalidArgumentError(f"horizon must be positive and finite, got {T!r}")
    A, B = sys.A, sys.B
    if panels is None:
        panels = max(4, int(math.ceil(np.linalg.norm(A, 2) * T)))
    nodes, weights = _gauss_panels(0.0, T, panels, order)
    G = np.zeros((sys.n, sys.n))
    for s, w in zip(nodes, weights):
        Es_B = expm(s * A) @ B
        G += w * (Es_B @ Es_B.T)
    return _from_matrix(G, T)


def _komornik_weight(t: np.ndarray, T: float, lam: float) -> np.ndarray:
    ramp_end = T + 0.5 / lam
    return np.where(
        t <= T,
        np.exp(-2.0 * lam * t),
        2.0 * lam * math.exp(-2.0 * lam * T) * (ramp_end - t),
    )


def komornik_gramian(
    sys: LinearSystem, T: float, lam: float, rtol: float = 1e-10
) -> Gramian:
    """Weighted backward Gramian whose inverse yields a rapid feedback.

    Integrates f(t) * exp(-t A) B B' exp(-t A') over [0, T + 1/(2 lam)],
    where the weight f decays as exp(-2 lam t) up to T and then ramps
    linearly (and continuously) to zero.  The piecewise weight breaks the
    constant-coefficient structure used by the block-exponential Gramian,
    so this integral is evaluated by composite Gauss-Legendre panels split
    exactly at t = T, refined until successive refinements agree to
    ``rtol`` in Frobenius norm.
    """
    if not (math.isfinite(T) and T > 0):
        raise InvalidArgumentError(f"horizon must be positive and finite, got {T!r}")
    if not (math.isfinite(lam) and lam > 0):
        raise InvalidArgumentError(f"rate must be positive and finite, got {lam!r}")
    A, B = sys.A, sys.B
    ramp_end = T + 0.5 / lam
    order = 12

    def evaluate(panels_main: int) -> np.ndarray:
        panels_ramp = max(2, panels_main // 2)
        n1, w1 = _gauss_panels(0.0, T, panels_main, order)
        n2, w2 = _gauss_panels(T, ramp_end, panels_ramp, order)
        nodes = np.concatenate([n1, n2])
        weights = np.concatenate([w1, w2]) * _komornik_weight(
            np.concatenate([n1, n2]), T, lam
        )
        C = np.zeros((sys.n, sys.n))
        for s, w in zip(nodes, weights):
            Es_B = expm(-s * A) @ B
            C += w * (Es_B @ Es_B.T)
        return C

    panels = max(4, int(math.ceil((np.linalg.norm(A, 2) + 2.0 * lam) * T)))
    C = evaluate(panels)
    for _ in range(8):
        panels *= 2
        refined = evaluate(panels)
        gap = np.linalg.norm(refined - C, "fro")
        C = refined
        if gap <= rtol * max(np.linalg.norm(C, "fro"), np.finfo(float).tiny):
            break
    return _from_matrix(C, ramp_end)
