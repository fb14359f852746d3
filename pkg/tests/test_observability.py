import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import random_controllable_system, random_skew_system, random_system

import obscert as oc
from obscert.exceptions import InvalidArgumentError


def _gramian_of(name_or_sys, T):
    sys = oc.builtin_system(name_or_sys) if isinstance(name_or_sys, str) else name_or_sys
    return sys, oc.controllability_gramian(sys, T)


def test_exact_constant_identity_gramian():
    sys = oc.LinearSystem(np.zeros((2, 2)), np.eye(2))
    g = oc.controllability_gramian(sys, 1.0)
    rep = oc.exact_controllability_constant(g)
    assert rep.value == pytest.approx(1.0, rel=1e-12)
    assert abs(np.linalg.norm(rep.witness) - 1.0) < 1e-10
    assert rep.method == "spectral"


def test_exact_constant_rotation():
    sys, g = _gramian_of("rotation", 2 * math.pi)
    rep = oc.exact_controllability_constant(g)
    assert rep.value == pytest.approx(1.0 / math.sqrt(math.pi), rel=1e-10)


def test_exact_constant_infinite_for_wave_heat():
    sys = oc.make_wave_heat(8, 0.3, 0.7)
    for T in (0.4, 1.1):
        g = oc.controllability_gramian(sys, T)
        assert oc.exact_controllability_constant(g).value == math.inf


def test_null_constant_all_identity():
    sys = oc.LinearSystem(np.zeros((2, 2)), np.eye(2))
    g = oc.controllability_gramian(sys, 1.0)
    rep = oc.null_controllability_constant(sys, g)
    assert rep.value == pytest.approx(1.0, rel=1e-12)


def test_null_constant_scalar_closed_form():
    sys = oc.LinearSystem([[1.0]], [[1.0]])
    g = oc.controllability_gramian(sys, 1.0)
    expected = math.e / math.sqrt((math.e**2 - 1.0) / 2.0)
    rep = oc.null_controllability_constant(sys, g)
    assert rep.value == pytest.approx(expected, rel=1e-10)


def test_null_constant_infinite_with_kernel_witness():
    sys = oc.LinearSystem(np.diag([1.0, -2.0]), np.array([[1.0], [0.0]]))
    g = oc.controllability_gramian(sys, 1.0)
    rep = oc.null_controllability_constant(sys, g)
    assert rep.value == math.inf
    # Witness is the uncontrolled direction e2, which S(T)' does not kill.
    assert abs(abs(rep.witness[1]) - 1.0) < 1e-10
    assert np.linalg.norm(oc.semigroup(sys, 1.0).T @ rep.witness) > 1e-3


def test_weak_constant_one_dimensional():
    sys, g = _gramian_of("integrator", 1.0)
    rep = oc.weak_constant(sys, g, 0.5)
    assert rep.value == pytest.approx(0.5, abs=1e-12)


def test_weak_constant_zero_iff_alpha_dominates_flow():
    rng = np.random.default_rng(30)
    for _ in range(6):
        sys = random_system(rng, spectral_norm=1.5)
        T = float(rng.uniform(0.3, 1.5))
        g = oc.controllability_gramian(sys, T)
        s_norm = np.linalg.norm(oc.semigroup(sys, T), 2)
        above = oc.weak_constant(sys, g, s_norm * 1.01)
        assert above.value == 0.0
        below = oc.weak_constant(sys, g, s_norm * 0.9)
        assert below.value > 0.0 or below.value == math.inf


def test_weak_constant_rotation_closed_form():
    sys, g = _gramian_of("rotation", 2 * math.pi)
    for alpha in (0.1, 0.5, 0.9):
        rep = oc.weak_constant(sys, g, alpha)
        assert rep.value == pytest.approx((1 - alpha) / math.sqrt(math.pi), abs=1e-6)
        assert abs(np.linalg.norm(rep.witness) - 1.0) < 1e-10


def test_weak_constant_monotone_in_alpha():
    rng = np.random.default_rng(31)
    for _ in range(5):
        sys = random_controllable_system(rng, n=int(rng.integers(1, 5)))
        g = oc.controllability_gramian(sys, 1.0)
        alphas = np.linspace(0.05, 1.2, 8)
        values = [oc.weak_constant(sys, g, a).value for a in alphas]
        for lo, hi in zip(values[1:], values[:-1]):
            assert lo <= hi + 1e-9 * max(hi, 1.0)


def test_weak_constant_certifies_inequality_and_witness_is_tight():
    rng = np.random.default_rng(32)
    for _ in range(5):
        sys = random_controllable_system(rng, n=int(rng.integers(2, 5)))
        T = 1.0
        g = oc.controllability_gramian(sys, T)
        s_norm = np.linalg.norm(oc.semigroup(sys, T), 2)
        alpha = 0.5 * s_norm
        rep = oc.weak_constant(sys, g, alpha)
        assert math.isfinite(rep.value) and rep.value > 0.0
        M = oc.semigroup(sys, T).T
        psi = rng.standard_normal((10_000, sys.n))
        lhs = np.linalg.norm(psi @ M.T, axis=1)
        rhs = rep.value * np.linalg.norm(psi @ g.sqrt.T, axis=1) + alpha * np.linalg.norm(
            psi, axis=1
        )
        assert np.all(lhs <= rhs + 1e-8)
        # Shrinking the constant by 1e-3 breaks the inequality at the witness.
        w = rep.witness
        lhs_w = np.linalg.norm(M @ w)
        rhs_w = rep.value * (1 - 1e-3) * np.linalg.norm(g.sqrt @ w) + alpha * np.linalg.norm(w)
        assert lhs_w > rhs_w


def test_weak_constant_limit_is_null_constant():
    rng = np.random.default_rng(33)
    for _ in range(6):
        sys = random_controllable_system(rng)
        g = oc.controllability_gramian(sys, 1.0)
        null = oc.null_controllability_constant(sys, g)
        weak = oc.weak_constant(sys, g, 1e-6)
        assert weak.value == pytest.approx(null.value, rel=1e-4)


def test_weak_constant_skew_adjoint_reduction():
    rng = np.random.default_rng(34)
    for _ in range(4):
        sys = random_skew_system(rng, n=3, m=2)
        g = oc.controllability_gramian(sys, 1.5)
        exact = oc.exact_controllability_constant(g)
        if not math.isfinite(exact.value):
            continue
        for alpha in (0.2, 0.5, 0.8):
            rep = oc.weak_constant(sys, g, alpha)
            assert rep.value == pytest.approx((1 - alpha) * exact.value, rel=1e-6)


def test_weak_constant_infinite_on_kernel_growth():
    # Uncontrolled second mode grows: ||S(T)' psi|| > alpha on the kernel.
    sys = oc.LinearSystem(np.diag([-1.0, 1.0]), np.array([[1.0], [0.0]]))
    g = oc.controllability_gramian(sys, 1.0)
    rep = oc.weak_constant(sys, g, 0.5)
    assert rep.value == math.inf
    assert abs(abs(rep.witness[1]) - 1.0) < 1e-10
    # With alpha above the kernel growth e^T the constant is finite.
    rep2 = oc.weak_constant(sys, g, math.e * 1.05)
    assert math.isfinite(rep2.value)


def test_weak_constant_rejects_bad_alpha():
    sys, g = _gramian_of("integrator", 1.0)
    for alpha in (0.0, -0.3, math.inf):
        with pytest.raises(InvalidArgumentError):
            oc.weak_constant(sys, g, alpha)
        with pytest.raises(InvalidArgumentError):
            oc.weak_constant_oracle(sys, g, alpha, 100)


def test_oracle_exact_in_one_dimension():
    sys, g = _gramian_of("integrator", 1.0)
    for alpha in (0.25, 0.5, 0.75):
        o = oc.weak_constant_oracle(sys, g, alpha, 10)
        w = oc.weak_constant(sys, g, alpha)
        assert o.value == pytest.approx(w.value, abs=1e-12)
        assert o.method == "oracle"


def test_oracle_close_on_rotation():
    sys, g = _gramian_of("rotation", 2 * math.pi)
    o = oc.weak_constant_oracle(sys, g, 0.5, 100_000)
    assert o.value == pytest.approx(0.5 / math.sqrt(math.pi), rel=1e-2)


def test_oracle_never_exceeds_optimized_value():
    rng = np.random.default_rng(35)
    for _ in range(8):
        sys = random_system(rng, n=int(rng.integers(1, 4)))
        g = oc.controllability_gramian(sys, 1.0)
        alpha = float(rng.uniform(0.1, 0.9)) * np.linalg.norm(oc.semigroup(sys, 1.0), 2)
        w = oc.weak_constant(sys, g, alpha)
        o = oc.weak_constant_oracle(sys, g, alpha, 20_000)
        if math.isfinite(w.value):
            assert o.value <= w.value + 1e-8
        else:
            assert o.value == math.inf or o.value <= 1e12


def test_report_witness_unit_norm_when_finite_positive():
    rng = np.random.default_rng(36)
    for _ in range(5):
        sys = random_controllable_system(rng, n=3)
        g = oc.controllability_gramian(sys, 0.8)
        alpha = 0.5 * np.linalg.norm(oc.semigroup(sys, 0.8), 2)
        rep = oc.weak_constant(sys, g, alpha)
        if math.isfinite(rep.value) and rep.value > 0:
            assert abs(np.linalg.norm(rep.witness) - 1.0) < 1e-10
