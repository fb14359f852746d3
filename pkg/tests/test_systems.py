import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import solve_ivp

from conftest import random_system

import obscert as oc
from obscert.exceptions import InvalidArgumentError, SystemFileError


def test_linear_system_shapes_and_promotion():
    sys = oc.LinearSystem([[0.0]], [1.0])
    assert sys.n == 1 and sys.m == 1
    assert sys.B.shape == (1, 1)
    with pytest.raises(InvalidArgumentError):
        oc.LinearSystem(np.zeros((2, 3)), np.zeros((2, 1)))
    with pytest.raises(InvalidArgumentError):
        oc.LinearSystem(np.zeros((2, 2)), np.zeros((3, 1)))
    with pytest.raises(InvalidArgumentError):
        oc.LinearSystem(np.array([[np.nan]]), np.ones((1, 1)))


def test_semigroup_zero_generator_is_identity():
    sys = oc.LinearSystem(np.zeros((2, 2)), np.ones((2, 1)))
    assert_allclose(oc.semigroup(sys, 5.0), np.eye(2), atol=1e-15)


def test_semigroup_quarter_turn_rotation():
    sys = oc.builtin_system("rotation")
    expected = np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert_allclose(oc.semigroup(sys, math.pi / 2), expected, atol=1e-14)


def test_semigroup_scalar_against_taylor_oracle():
    # 64-term Taylor series of e at 1, summed small-to-large.
    terms = []
    term = 1.0
    for k in range(1, 64):
        terms.append(term)
        term /= k
    taylor = math.fsum(sorted(terms))
    sys = oc.LinearSystem([[1.0]], [[1.0]])
    val = oc.semigroup(sys, 1.0)[0, 0]
    assert abs(val - taylor) <= 1e-12 * taylor


def test_semigroup_rejects_nonfinite_time():
    sys = oc.builtin_system("integrator")
    with pytest.raises(InvalidArgumentError):
        oc.semigroup(sys, math.inf)
    with pytest.raises(InvalidArgumentError):
        oc.semigroup(sys, math.nan)


def test_semigroup_group_property():
    rng = np.random.default_rng(7)
    for _ in range(10):
        sys = random_system(rng, spectral_norm=5.0)
        s, t = rng.uniform(-2, 2, size=2)
        left = oc.semigroup(sys, s + t)
        right = oc.semigroup(sys, s) @ oc.semigroup(sys, t)
        assert_allclose(left, right, atol=1e-10 * max(1.0, np.linalg.norm(right)))


def test_semigroup_adjoint_via_transposition():
    rng = np.random.default_rng(8)
    sys = random_system(rng, n=4, spectral_norm=3.0)
    adj = oc.LinearSystem(sys.A.T, sys.B)
    t = 0.9
    assert_allclose(oc.semigroup(sys, t).T, oc.semigroup(adj, t), atol=1e-12)


def test_kalman_scalar_integrator():
    dec = oc.kalman_decompose(oc.LinearSystem([[0.0]], [[1.0]]))
    assert dec.rank == 1
    assert dec.uncontrollable_spectrum.size == 0


def test_kalman_block_diagonal_uncontrolled_mode():
    sys = oc.LinearSystem(np.diag([1.0, -2.0]), np.array([[1.0], [0.0]]))
    dec = oc.kalman_decompose(sys)
    assert dec.rank == 1
    assert_allclose(dec.uncontrollable_spectrum, [-2.0], atol=1e-12)
    # Controllable subspace is e1.
    assert_allclose(np.abs(dec.basis[:, 0]), [1.0, 0.0], atol=1e-12)


def test_kalman_basis_orthogonal_and_matches_matrix_rank():
    rng = np.random.default_rng(11)
    for _ in range(15):
        sys = random_system(rng)
        dec = oc.kalman_decompose(sys)
        assert np.abs(dec.basis.T @ dec.basis - np.eye(sys.n)).max() < 1e-10
        # Oracle: literal Kalman matrix rank (safe at this scale).
        blocks = [sys.B]
        for _ in range(sys.n - 1):
            blocks.append(sys.A @ blocks[-1])
        K = np.hstack(blocks)
        assert dec.rank == np.linalg.matrix_rank(K, tol=1e-9 * np.linalg.norm(K, 2))


def test_kalman_rank_invariant_under_shift():
    rng = np.random.default_rng(12)
    uncontrollable = oc.LinearSystem(np.diag([1.0, -2.0, 0.5]), np.array([[1.0], [0.0], [1.0]]))
    systems = [random_system(rng) for _ in range(5)] + [uncontrollable]
    for sys in systems:
        base = oc.kalman_decompose(sys).rank
        for omega in (-1.5, 0.5, 3.0):
            assert oc.kalman_decompose(oc.shift(sys, omega)).rank == base


def test_shift_definition_and_flow_factorization():
    assert_allclose(oc.shift(oc.LinearSystem([[0.0]], [[1.0]]), 2.0).A, [[2.0]])
    rng = np.random.default_rng(13)
    sys = random_system(rng, n=4)
    omega, t = 1.3, 0.7
    left = oc.semigroup(oc.shift(sys, omega), t)
    right = math.exp(omega * t) * oc.semigroup(sys, t)
    assert_allclose(left, right, atol=1e-10 * np.linalg.norm(right))


def test_shift_round_trip():
    rng = np.random.default_rng(14)
    sys = random_system(rng, n=3)
    back = oc.shift(oc.shift(sys, 1.0), -1.0)
    # Adding and subtracting 1.0 on the diagonal rounds in the last bit.
    assert_allclose(back.A, sys.A, rtol=0, atol=1e-14)
    assert np.array_equal(back.B, sys.B)


def test_wave_heat_full_interval_indicator():
    sys = oc.make_wave_heat(3, 0.01, 0.99)
    N = 3
    assert sys.n == 3 * N and sys.m == N
    assert_allclose(sys.B[N : 2 * N, :], np.eye(N))
    assert np.all(sys.B[:N] == 0.0)
    assert np.all(sys.B[2 * N :] == 0.0)


def test_wave_heat_heat_rows_of_B_exactly_zero():
    for args in [(5, 0.2, 0.6), (12, 0.45, 0.55), (20, 0.3, 0.7)]:
        sys = oc.make_wave_heat(*args)
        N = args[0]
        assert np.all(sys.B[2 * N :, :] == 0.0)


def test_wave_heat_block_sparsity():
    sys = oc.make_wave_heat(8, 0.3, 0.7)
    N = 8
    A = sys.A
    zero_blocks = [(0, 0), (0, 2), (1, 1), (2, 0), (2, 1)]
    for bi, bj in zero_blocks:
        assert np.all(A[bi * N : (bi + 1) * N, bj * N : (bj + 1) * N] == 0.0)
    # The two wave coupling blocks are exact negative transposes.
    assert_allclose(A[0:N, N : 2 * N], -A[N : 2 * N, 0:N].T, atol=1e-12)
    assert_allclose(A[N : 2 * N, 2 * N :], np.eye(N))


def test_wave_heat_interval_without_nodes_rejected():
    # Nodes of the 3-point grid sit at 0.25, 0.5, 0.75.
    with pytest.raises(InvalidArgumentError):
        oc.make_wave_heat(3, 0.26, 0.49)
    with pytest.raises(InvalidArgumentError):
        oc.make_wave_heat(3, 0.6, 0.2)
    with pytest.raises(InvalidArgumentError):
        oc.make_wave_heat(2, 0.3, 0.7)


def test_wave_heat_energy_conservation_with_integration_oracle():
    sys = oc.make_wave_heat(20, 0.3, 0.7)
    N = 20
    rng = np.random.default_rng(15)
    y0 = np.zeros(sys.n)
    y0[: 2 * N] = rng.standard_normal(2 * N)
    y0 /= np.linalg.norm(y0)
    norms = []
    for t in np.linspace(0.0, 10.0, 21):
        yt = oc.semigroup(sys, t) @ y0
        norms.append(np.linalg.norm(yt[: 2 * N]))
    assert max(norms) - min(norms) < 1e-6
    # Independent oracle: high-accuracy ODE integration of the wave part.
    wave_gen = sys.A[: 2 * N, : 2 * N]
    res = solve_ivp(
        lambda _, y: wave_gen @ y, (0.0, 2.0), y0[: 2 * N], rtol=1e-12, atol=1e-14
    )
    assert_allclose(res.y[:, -1], (oc.semigroup(sys, 2.0) @ y0)[: 2 * N], atol=1e-8)


def test_system_file_round_trip_bitwise(tmp_path):
    rng = np.random.default_rng(16)
    sys = oc.LinearSystem(rng.standard_normal((5, 5)), rng.standard_normal((5, 2)), label="rt")
    path = tmp_path / "sys.json"
    oc.write_system_file(sys, path)
    back = oc.parse_system_file(path)
    assert np.array_equal(back.A, sys.A)
    assert np.array_equal(back.B, sys.B)
    assert back.label == "rt"


def test_system_file_minimal_integrator(tmp_path):
    path = tmp_path / "integ.json"
    path.write_text(json.dumps({"n": 1, "m": 1, "A": [0.0], "B": [1.0]}))
    sys = oc.parse_system_file(path)
    assert sys.n == 1 and sys.m == 1
    assert sys.A[0, 0] == 0.0 and sys.B[0, 0] == 1.0


def test_system_file_shape_mismatch(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 2, "m": 1, "A": [0.0, 1.0, 2.0], "B": [1.0, 0.0]}))
    with pytest.raises(SystemFileError, match="'A' has 3 entries, expected 4"):
        oc.parse_system_file(path)


def test_system_file_syntax_error_carries_position(tmp_path):
    path = tmp_path / "syntax.json"
    path.write_text('{"n": 1,\n  "m": }')
    with pytest.raises(SystemFileError, match=r":2:"):
        oc.parse_system_file(path)


def test_system_file_rejects_nonfinite_and_missing(tmp_path):
    path = tmp_path / "inf.json"
    path.write_text('{"n": 1, "m": 1, "A": [Infinity], "B": [1.0]}')
    with pytest.raises(SystemFileError, match="non-finite"):
        oc.parse_system_file(path)
    with pytest.raises(SystemFileError, match="cannot read"):
        oc.parse_system_file(tmp_path / "absent.json")


def test_builtin_registry():
    assert set(oc.BUILTIN_SYSTEMS) == {"integrator", "rotation", "wave-heat"}
    with pytest.raises(InvalidArgumentError):
        oc.builtin_system("nope")
