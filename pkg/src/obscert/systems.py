"""Linear time-invariant control systems, their flow maps, and built-in examples.

The state equation throughout is ``y'(t) = A y(t) + B u(t)`` on R^n with
inputs in R^m.  All geometry is Euclidean: example generators that start
from a weighted energy space (such as the coupled wave-heat system) apply a
symmetric change of variables before returning, so every downstream solver
can work with plain inner products.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import expm, null_space

from .exceptions import InvalidArgumentError, SystemFileError

__all__ = [
    "LinearSystem",
    "KalmanDecomposition",
    "semigroup",
    "kalman_decompose",
    "shift",
    "make_wave_heat",
    "builtin_system",
    "BUILTIN_SYSTEMS",
    "parse_system_file",
    "write_system_file",
]


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """State-space pair (A, B) with A an n-by-n matrix and B n-by-m.

    Matrices are validated and stored as float arrays on construction;
    1-D ``B`` input is promoted to a single column.
    """

    A: np.ndarray
    B: np.ndarray
    label: str | None = None

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)
        if A.ndim == 0:
            A = A.reshape(1, 1)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise InvalidArgumentError(f"A must be square and nonempty, got shape {A.shape}")
        if B.ndim != 2 or B.shape[0] != A.shape[0] or B.shape[1] < 1:
            raise InvalidArgumentError(
                f"B must have {A.shape[0]} rows and at least one column, got shape {B.shape}"
            )
        if not np.all(np.isfinite(A)) or not np.all(np.isfinite(B)):
            raise InvalidArgumentError("A and B must have finite entries")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        """State dimension."""
        return self.A.shape[0]

    @property
    def m(self) -> int:
        """Input dimension."""
        return self.B.shape[1]


@dataclass(frozen=True, eq=False)
class KalmanDecomposition:
    """Controllable-subspace data of a pair (A, B).

    ``basis`` is orthogonal; its first ``rank`` columns span the controllable
    subspace.  ``uncontrollable_spectrum`` lists the eigenvalues of A
    restricted (by orthogonal projection) to the complement, and is empty
    when the pair is controllable.
    """

    rank: int
    basis: np.ndarray
    uncontrollable_spectrum: np.ndarray


def semigroup(sys: LinearSystem, t: float) -> np.ndarray:
    """Flow map exp(t A) of the uncontrolled dynamics.

    Negative times are allowed (matrix generators yield groups).  Computed
    by scaling-and-squaring with a degree-13 Pade approximant, so the
    relative accuracy tracks machine precision for moderate ``||t A||``.
    """
    if not math.isfinite(t):
        raise InvalidArgumentError(f"time must be finite, got {t!r}")
    return expm(t * sys.A)


def _orth_columns(M: np.ndarray, cutoff: float) -> np.ndarray:
    """Orthonormal basis of the column space, keeping singular values > cutoff."""
    if M.size == 0:
        return M.reshape(M.shape[0], 0)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    keep = int(np.sum(s > cutoff))
    return U[:, :keep]


def kalman_decompose(sys: LinearSystem, rtol: float = 1e-9) -> KalmanDecomposition:
    """Split the state space into controllable and uncontrollable parts.

    The controllable subspace is grown stage by stage: starting from an
    orthonormal basis of Ran(B), each step appends the directions of A
    applied to the current basis that are not already represented.  In
    exact arithmetic this equals the column space of the Kalman matrix
    [B, AB, ..., A^{n-1} B]; avoiding explicit powers of A keeps the rank
    decision meaningful for stiff systems whose Kalman matrix would
    overflow.  ``rtol`` is the relative singular-value threshold applied at
    each stage.
    """
    A = sys.A
    n = sys.n
    scale = np.linalg.norm(sys.B, 2)
    V = _orth_columns(sys.B, rtol * scale) if scale > 0 else np.zeros((n, 0))
    while 0 < V.shape[1] < n:
        W = A @ V
        stage_scale = np.linalg.norm(W, 2)
        # Project out the current subspace twice for numerical orthogonality.
        W = W - V @ (V.T @ W)
        W = W - V @ (V.T @ W)
        W = _orth_columns(W, rtol * max(stage_scale, scale))
        if W.shape[1] == 0:
            break
        V = np.hstack([V, W])
    rank = V.shape[1]
    if rank == 0:
        basis = np.eye(n)
    elif rank == n:
        basis = V
    else:
        basis = np.hstack([V, null_space(V.T)])
    if rank < n:
        comp = basis[:, rank:]
        spectrum = np.sort_complex(np.linalg.eigvals(comp.T @ A @ comp))
    else:
        spectrum = np.zeros(0, dtype=complex)
    return KalmanDecomposition(rank=rank, basis=basis, uncontrollable_spectrum=spectrum)


def shift(sys: LinearSystem, omega: float) -> LinearSystem:
    """System with generator A + omega*I and unchanged input matrix."""
    if not math.isfinite(omega):
        raise InvalidArgumentError(f"shift must be finite, got {omega!r}")
    return LinearSystem(sys.A + omega * np.eye(sys.n), sys.B, label=sys.label)


def make_wave_heat(grid_points: int, control_lo: float, control_hi: float) -> LinearSystem:
    """Finite-difference analog of a coupled wave-heat system on (0, 1).

    The state stacks (z, z_t, w): a wave equation z_tt = Lap z + w forced on
    the z_t component by a control supported on the nodes inside
    (control_lo, control_hi), coupled to an uncontrolled heat equation
    w_t = Lap w.  Dirichlet conditions; Lap is the 3-point Laplacian on
    ``grid_points`` interior nodes.

    The natural energy pairs the z block with the H^1_0 stiffness form and
    the z_t, w blocks with the grid-weighted L^2 form.  A symmetric
    congruence maps that geometry to the Euclidean one, which is what the
    returned system uses; with Om = sqrt(stiffness)/h the blocks become

        A = [[0,  Om, 0 ],     B = [[0        ],
             [-Om, 0, I ],          [diag(chi)],
             [0,   0, Lap]]         [0        ]]

    so the wave part is exactly skew (its Euclidean norm is conserved under
    zero control) and the heat rows of B are exactly zero.
    """
    if grid_points < 3:
        raise InvalidArgumentError(f"grid_points must be >= 3, got {grid_points}")
    if not (0.0 < control_lo < control_hi < 1.0):
        raise InvalidArgumentError(
            f"control interval must satisfy 0 < lo < hi < 1, got ({control_lo}, {control_hi})"
        )
    N = int(grid_points)
    h = 1.0 / (N + 1)
    nodes = h * np.arange(1, N + 1)
    chi = ((nodes > control_lo) & (nodes < control_hi)).astype(float)
    if not chi.any():
        raise InvalidArgumentError(
            f"control interval ({control_lo}, {control_hi}) contains no grid node at n={N}"
        )

    second_diff = 2.0 * np.eye(N) - np.eye(N, k=1) - np.eye(N, k=-1)
    laplacian = -second_diff / h**2
    theta, Q = np.linalg.eigh(second_diff)
    omega_block = (Q * np.sqrt(theta)) @ Q.T / h

    A = np.zeros((3 * N, 3 * N))
    A[0:N, N : 2 * N] = omega_block
    A[N : 2 * N, 0:N] = -omega_block
    A[N : 2 * N, 2 * N :] = np.eye(N)
    A[2 * N :, 2 * N :] = laplacian

    B = np.zeros((3 * N, N))
    B[N : 2 * N, :] = np.diag(chi)
    return LinearSystem(A, B, label=f"wave-heat(grid={N}, control=({control_lo},{control_hi}))")


def _integrator() -> LinearSystem:
    return LinearSystem(np.zeros((1, 1)), np.ones((1, 1)), label="integrator")


def _rotation() -> LinearSystem:
    return LinearSystem(np.array([[0.0, 1.0], [-1.0, 0.0]]), np.array([[1.0], [0.0]]), label="rotation")


BUILTIN_SYSTEMS = {
    "integrator": _integrator,
    "rotation": _rotation,
    "wave-heat": lambda: make_wave_heat(20, 0.3, 0.7),
}


def builtin_system(name: str) -> LinearSystem:
    """Instantiate a built-in example system by name."""
    try:
        factory = BUILTIN_SYSTEMS[name]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown built-in system {name!r}; choose from {sorted(BUILTIN_SYSTEMS)}"
        ) from None
    return factory()


def parse_system_file(path: str | Path) -> LinearSystem:
    """Read a system specification file (JSON, UTF-8).

    Schema: ``{"n": int, "m": int, "A": [n*n floats, row-major],
    "B": [n*m floats, row-major], "label": optional str}``.
    Shape mismatches and non-finite entries are rejected with a diagnostic
    naming the offending field; syntax errors carry line and column.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SystemFileError(f"cannot read system file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemFileError(
            f"{path}:{exc.lineno}:{exc.colno}: not valid JSON: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise SystemFileError(f"{path}: top-level value must be an object")
    for key in ("n", "m", "A", "B"):
        if key not in doc:
            raise SystemFileError(f"{path}: missing required field {key!r}")
    n, m = doc["n"], doc["m"]
    if not isinstance(n, int) or not isinstance(m, int) or n < 1 or m < 1:
        raise SystemFileError(f"{path}: fields 'n' and 'm' must be positive integers")

    def _field(name: str, length: int) -> np.ndarray:
        raw = doc[name]
        if not isinstance(raw, list):
            raise SystemFileError(f"{path}: field {name!r} must be a flat array of numbers")
        if len(raw) != length:
            raise SystemFileError(
                f"{path}: field {name!r} has {len(raw)} entries, expected {length}"
            )
        try:
            arr = np.array(raw, dtype=float)
        except (TypeError, ValueError) as exc:
            raise SystemFileError(f"{path}: field {name!r} holds a non-numeric entry") from exc
        if not np.all(np.isfinite(arr)):
            raise SystemFileError(f"{path}: field {name!r} holds a non-finite entry")
        return arr

    A = _field("A", n * n).reshape(n, n)
    B = _field("B", n * m).reshape(n, m)
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise SystemFileError(f"{path}: field 'label' must be a string")
    return LinearSystem(A, B, label=label)


def write_system_file(sys: LinearSystem, path: str | Path) -> None:
    """Write ``sys`` in the format read back by :func:`parse_system_file`.

    Floats are serialized with shortest round-trip repr, so a write/parse
    cycle reproduces the matrices bit for bit.
    """
    doc: dict = {
        "n": sys.n,
        "m": sys.m,
        "A": sys.A.ravel().tolist(),
        "B": sys.B.ravel().tolist(),
    }
    if sys.label is not None:
        doc["label"] = sys.label
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
