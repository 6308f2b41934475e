import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from complexjacobi import (
    ComplexJacobi,
    DiscreteMeasure,
    MomentSequence,
    SpectralData,
    Tolerances,
    block_embed,
    dense,
    random_jacobi,
    unembed,
    validate,
    with_arguments,
)
from complexjacobi.core import BlockJacobi, wrap_angle
from complexjacobi.errors import (
    ArgMismatch,
    PhaseOutOfRange,
    ShapeError,
    ValidationError,
    ZeroOffDiagonal,
)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


def test_validate_rejects_length_mismatch():
    with pytest.raises(ShapeError):
        validate([1.0, 1.0], [0.0, 0.0])
    with pytest.raises(ShapeError):
        validate([], [])


def test_validate_rejects_zero_offdiagonal():
    with pytest.raises(ZeroOffDiagonal):
        validate([1.0, 0.0], [0, 0, 0])


def test_complex_a_needs_arguments():
    with pytest.raises(ArgMismatch):
        validate([1j], [0, 0])
    with pytest.raises(ArgMismatch):
        validate([-1.0], [0, 0])


def test_prescribed_arguments_checked():
    J = validate([2j], [0, 0], arg_spec=[math.pi / 2])
    assert J.arg_spec[0] == pytest.approx(math.pi / 2)
    with pytest.raises(ArgMismatch):
        validate([2j], [0, 0], arg_spec=[0.0])
    with pytest.raises(ArgMismatch):
        validate([1.0], [0, 0], arg_spec=[-math.pi])
    with pytest.raises(ShapeError):
        validate([1.0], [0, 0], arg_spec=[0.0, 0.0])


def test_argument_pi_accepted():
    J = with_arguments([1.5], [0, 1], [math.pi])
    assert J.a[0] == pytest.approx(-1.5)


@given(st.floats(-20, 20, allow_nan=False))
def test_wrap_angle_range(t):
    w = wrap_angle(t)
    assert -math.pi < w <= math.pi
    assert math.isclose(math.cos(w), math.cos(t), abs_tol=1e-9)
    assert math.isclose(math.sin(w), math.sin(t), abs_tol=1e-9)


def test_dense_is_complex_symmetric():
    J = random_jacobi(6, 3)
    M = dense(J)
    assert np.array_equal(M, M.T)
    assert np.array_equal(np.diag(M), J.b)
    assert np.array_equal(np.diag(M, 1), J.a)


@given(st.integers(1, 9), st.integers(0, 10_000))
def test_matvec_matches_dense(n, seed):
    J = random_jacobi(n, seed)
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    assert np.allclose(J.matvec(x), dense(J) @ x, atol=1e-12)
    assert np.allclose(J.rmatvec(x), dense(J).conj().T @ x, atol=1e-12)


def test_parameters_are_read_only():
    J = random_jacobi(3, 0)
    with pytest.raises(ValueError):
        J.b[0] = 5


@given(st.lists(cplx, min_size=1, max_size=6))
def test_jacobi_json_round_trip_is_bit_exact(b):
    a = [abs(z.real) + 0.5 for z in b[1:]]
    J = validate(a, b)
    K = ComplexJacobi.from_json(J.to_json())
    assert np.array_equal(J.a, K.a) and np.array_equal(J.b, K.b)


def test_jacobi_json_with_arguments_round_trip():
    J = random_jacobi(4, 1, arg_spec=[0.3, -2.0, math.pi])
    K = ComplexJacobi.from_json(J.to_json())
    assert np.array_equal(J.a, K.a) and np.array_equal(J.arg_spec, K.arg_spec)


def test_random_jacobi_ranges_and_determinism():
    J = random_jacobi(200, 42)
    assert np.all((J.a.real >= 0.5) & (J.a.real <= 2.0)) and np.all(J.a.imag == 0)
    assert np.all(np.abs(J.b) <= 2.0)
    assert np.array_equal(J.b, random_jacobi(200, 42).b)


def test_discrete_measure_checks():
    DiscreteMeasure([0.0, 1.0], [0.25, 0.75])
    with pytest.raises(ValidationError):
        DiscreteMeasure([1.0, 0.5], [0.5, 0.5])
    with pytest.raises(ValidationError):
        DiscreteMeasure([0.0, 1.0], [0.5, 0.6])
    with pytest.raises(ValidationError):
        DiscreteMeasure([0.0, 1.0], [1.0, 0.0])
    sub = DiscreteMeasure([1.0], [0.3], probability=False)
    assert sub.total() == pytest.approx(0.3)


def test_spectral_data_checks():
    with pytest.raises(PhaseOutOfRange):
        SpectralData.build([1.0], [1.0], [1.5])
    with pytest.raises(ValidationError):
        SpectralData.build([0.0, 1.0], [0.5, 0.5], [0.5, 1.0])
    with pytest.raises(ValidationError):
        SpectralData.build([-1.0, 1.0], [0.5, 0.5], [1.0, 1.0])
    with pytest.raises(ShapeError):
        SpectralData.build([1.0], [1.0], [1.0, 1.0])


@given(
    st.lists(st.floats(0.01, 10), min_size=1, max_size=5, unique=True),
    st.data(),
)
def test_spectral_data_json_round_trip(points, data):
    points = sorted(points)
    k = len(points)
    w = np.full(k, 1.0 / k)
    w[-1] = 1.0 - w[:-1].sum()
    ang = data.draw(st.lists(st.floats(-3, 3), min_size=k, max_size=k))
    psi = np.exp(1j * np.array(ang))
    d = SpectralData.build(points, w, psi)
    e = SpectralData.from_json(d.to_json())
    assert np.array_equal(d.points, e.points)
    assert np.array_equal(d.weights, e.weights)
    assert np.array_equal(d.psi, e.psi)


def test_block_embed_is_a_permutation_of_the_hermitian_dilation():
    # interleaving (x_0, y_0, x_1, y_1, ...) maps [[0, J], [J^*, 0]] to the block matrix
    J = random_jacobi(5, 9, arg_spec=[0.4, -1.0, 2.5, 3.0])
    n = J.n
    D = dense(J)
    H = np.block([[np.zeros((n, n)), D], [D.conj().T, np.zeros((n, n))]])
    perm = np.ravel(np.column_stack([np.arange(n), n + np.arange(n)]))
    assert np.allclose(block_embed(J).dense(), H[np.ix_(perm, perm)], atol=0)


def test_unembed_inverts_block_embed():
    J = random_jacobi(4, 2, arg_spec=[0.1, 0.2, -0.3])
    K = unembed(block_embed(J))
    assert np.allclose(K.a, J.a) and np.allclose(K.b, J.b)


def test_block_jacobi_checks():
    with pytest.raises(ValidationError):
        BlockJacobi(np.zeros((0, 2, 2)), [[[0, 1], [2, 0]]])
    with pytest.raises(ValidationError):
        BlockJacobi([np.zeros((2, 2))], np.zeros((2, 2, 2)))
    with pytest.raises(ShapeError):
        BlockJacobi(np.zeros((2, 2, 2)), np.zeros((2, 2, 2)))


def test_moment_sequence_checks():
    MomentSequence([1, 1j, 2])
    with pytest.raises(ValidationError):
        MomentSequence([2, 0, 1])
    with pytest.raises(ValidationError):
        MomentSequence([1, 0, -1])
    with pytest.raises(ValidationError):
        MomentSequence([1, 2, 1])
    m = MomentSequence([1, 0.5j, 3])
    assert np.array_equal(MomentSequence.from_json(m.to_json()).omega, m.omega)


def test_tolerances_defaults():
    t = Tolerances()
    assert (t.mass, t.phase, t.herm, t.breakdown) == (1e-10, 1e-8, 1e-12, 1e-10)
    assert (t.cluster, t.gauge, t.gram) == (1e-7, 1e-7, 1e-8)
