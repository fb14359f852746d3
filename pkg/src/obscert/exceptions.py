"""Exception types shared across the package.

Each class maps to one machine-readable error category used by the CLI
(`invalid-argument`, `infeasible`, `not-stabilizable`, `io`).
"""

import numpy as np


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class SystemFileError(ValueError):
    """A system specification file is missing, malformed, or inconsistent."""


class InfeasibleError(RuntimeError):
    """The requested steering problem has no admissible control.

    ``direction`` holds a unit vector that obstructs feasibility: it lies in
    the kernel of the Gramian while the propagated initial state has a
    component along it that the target ball cannot absorb.
    """

    def __init__(self, message: str, direction: np.ndarray | None = None):
        super().__init__(message)
        self.direction = direction


class NotStabilizableError(RuntimeError):
    """No certificate exists at the requested parameters.

    ``direction`` names an uncontrollable (or unobservable-through-the-
    Gramian) unit vector when one is known.
    """

    def __init__(self, message: str, direction: np.ndarray | None = None):
        super().__init__(message)
        self.direction = direction
