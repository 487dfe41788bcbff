import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from loggas.errors import DimensionTooLarge, NotSelfDual
from loggas.quaternion import (Quaternion, QuaternionMatrix, complexify, conj_dual, from_complex_2x2, qdet,
                               to_complex_2x2)
from loggas.verify import random_self_dual

I2 = np.eye(2)
E1 = Quaternion(0, 1, 0, 0)
E2 = Quaternion(0, 0, 1, 0)
E3 = Quaternion(0, 0, 0, 1)

finite = st.floats(-10, 10, allow_nan=False)
quats = st.tuples(finite, finite, finite, finite, finite, finite, finite, finite).map(
    lambda t: Quaternion(*(complex(t[2 * k], t[2 * k + 1]) for k in range(4))))


def test_identity_matrix_maps_to_one():
    assert from_complex_2x2(I2) == Quaternion(1, 0, 0, 0)


def test_e1_from_matrix():
    assert from_complex_2x2([[1j, 0], [0, -1j]]).isclose(E1)


def test_basis_matrices():
    assert np.array_equal(to_complex_2x2(Quaternion(1)), I2)
    assert np.array_equal(to_complex_2x2(E2), [[0, 1], [-1, 0]])
    assert np.array_equal(to_complex_2x2(E3), [[0, 1j], [1j, 0]])


def test_conj_dual_examples():
    assert conj_dual(Quaternion(1)) == Quaternion(1)
    assert conj_dual(E1) == Quaternion(0, -1, 0, 0)


def test_basis_multiplication_table():
    one = Quaternion(1)
    for e in (E1, E2, E3):
        assert (e * e).isclose(-one)
    assert (E1 * E2).isclose(E3)
    assert (E2 * E3).isclose(E1)
    assert (E3 * E1).isclose(E2)


@given(quats)
def test_roundtrip_complex_2x2(q):
    assert from_complex_2x2(to_complex_2x2(q)).isclose(q, atol=1e-9)


@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), min_size=4,
                max_size=4))
def test_roundtrip_from_matrix(vals):
    m = np.array(vals).reshape(2, 2)
    assert np.allclose(to_complex_2x2(from_complex_2x2(m)), m, atol=1e-12)


@given(quats)
def test_conj_dual_involution(q):
    assert conj_dual(conj_dual(q)) == q


@given(quats, quats)
def test_conj_dual_reverses_products(p, q):
    assert conj_dual(p * q).isclose(conj_dual(q) * conj_dual(p), atol=1e-9)


def test_qdet_scalar_1x1():
    assert qdet(QuaternionMatrix.from_scalar([[2.5]])) == pytest.approx(2.5)


def test_qdet_diagonal_scalar():
    assert qdet(QuaternionMatrix.from_scalar(np.diag([3.0, -2.0]))) == pytest.approx(-6.0)


def test_complexify_small_cases():
    assert np.array_equal(complexify(QuaternionMatrix([[[1, 0, 0, 0]]])), I2)
    assert np.array_equal(complexify(QuaternionMatrix([[[0, 0, 1, 0]]], self_dual=False)), [[0, 1], [-1, 0]])


def test_complexify_blockwise_n2():
    rng = np.random.default_rng(5)
    A = QuaternionMatrix(rng.standard_normal((2, 2, 4)) + 1j * rng.standard_normal((2, 2, 4)), self_dual=False)
    C = complexify(A)
    for i, j in itertools.product(range(2), repeat=2):
        assert np.allclose(C[2 * i:2 * i + 2, 2 * j:2 * j + 2], to_complex_2x2(A[i, j]))


@pytest.mark.parametrize("kind", ["real", "kernel"])
def test_qdet_squared_matches_complex_det(kind):
    rng = np.random.default_rng(11)
    for t in range(50):
        A = random_self_dual(1 + t % 5, rng, kind)
        q = qdet(A)
        d = np.linalg.det(complexify(A))
        assert abs(q * q - d) <= 1e-8 * (1 + abs(d))
        assert abs(q.imag) <= 1e-10 * (1 + abs(q))


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_qdet_scalar_entries_match_det(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    a = a + a.T
    assert qdet(QuaternionMatrix.from_scalar(a)) == pytest.approx(np.linalg.det(a), abs=1e-12 * (1 + abs(np.linalg.det(a))))


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_qdet_permutation_invariant(n, seed):
    rng = np.random.default_rng(seed)
    A = random_self_dual(n, rng, "kernel")
    perm = rng.permutation(n)
    assert abs(qdet(A.permuted(perm)) - qdet(A)) <= 1e-12 * (1 + abs(qdet(A)))


def test_reversed_cycle_check_passes_on_self_dual():
    A = random_self_dual(4, np.random.default_rng(2), "real")
    assert qdet(A, check_cycles=True) == pytest.approx(qdet(A))


def test_not_self_dual_rejected():
    c = np.zeros((2, 2, 4), complex)
    c[0, 1, 1] = 1.0
    c[1, 0, 1] = 1.0
    with pytest.raises(NotSelfDual):
        qdet(QuaternionMatrix(c))


def test_dimension_cap():
    with pytest.raises(DimensionTooLarge):
        qdet(QuaternionMatrix.from_scalar(np.eye(10)))


def test_dimension_nine_allowed():
    a = np.eye(9) * 2
    assert qdet(QuaternionMatrix.from_scalar(a)) == pytest.approx(2**9)
