"""Shared generators for randomized tests.

All randomness flows through explicit ``numpy.random.Generator`` instances
seeded in the tests, so every run is reproducible.
"""

import numpy as np

import obscert as oc


def random_system(rng, n=None, m=None, spectral_norm=2.0):
    """Random pair with ||A|| rescaled to ``spectral_norm``."""
    if n is None:
        n = int(rng.integers(1, 7))
    if m is None:
        m = int(rng.integers(1, n + 1))
    A = rng.standard_normal((n, n))
    norm = np.linalg.norm(A, 2)
    if norm > 0:
        A *= spectral_norm / norm
    B = rng.standard_normal((n, m))
    return oc.LinearSystem(A, B)


def random_controllable_system(rng, n=None, m=None, spectral_norm=2.0):
    """Random pair resampled until the Kalman rank is full."""
    while True:
        sys = random_system(rng, n=n, m=m, spectral_norm=spectral_norm)
        if oc.kalman_decompose(sys).rank == sys.n:
            return sys


def random_skew_system(rng, n, m=1, spectral_norm=2.0):
    """Random pair whose generator is skew-symmetric."""
    W = rng.standard_normal((n, n))
    A = W - W.T
    norm = np.linalg.norm(A, 2)
    if norm > 0:
        A *= spectral_norm / norm
    B = rng.standard_normal((n, m))
    return oc.LinearSystem(A, B)
