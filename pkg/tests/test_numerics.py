import numpy as np
import pytest
from hypothesis import given, strategies as st

from birdcast.numerics import Rng, ShapeError, add, hadamard, matmul, relu, sigmoid, tanh, transpose


def test_matmul_examples():
    A = np.array([[1.5, -2.0], [0.25, 3.0]])
    np.testing.assert_array_equal(matmul(np.eye(2), A), A)
    np.testing.assert_array_equal(matmul([[1, 2], [3, 4]], [[5], [6]]), [[17], [39]])
    with pytest.raises(ShapeError, match=r"\(2, 3\) and \(2, 3\)"):
        matmul(np.ones((2, 3)), np.ones((2, 3)))


def test_elementwise_shape_checks():
    with pytest.raises(ShapeError):
        add(np.ones((2, 2)), np.ones((2, 3)))
    with pytest.raises(ShapeError):
        hadamard(np.ones((1, 2)), np.ones((2, 1)))
    np.testing.assert_array_equal(transpose([[1, 2, 3]]), [[1], [2], [3]])


def test_matmul_associative():
    rng = np.random.default_rng(0)
    for _ in range(20):
        A, B, C = (rng.normal(size=(4, 4)) for _ in range(3))
        np.testing.assert_allclose(matmul(matmul(A, B), C), matmul(A, matmul(B, C)), rtol=1e-10, atol=1e-12)


def test_activation_examples():
    assert sigmoid(0.0) == 0.5
    assert tanh(0.0) == 0.0
    assert relu(-3.2) == 0.0
    assert relu(1.5) == 1.5


@given(st.floats(-30, 30))
def test_sigmoid_symmetry(x):
    assert abs(sigmoid(x) + sigmoid(-x) - 1.0) <= 1e-12


def test_sigmoid_saturates_without_overflow():
    with np.errstate(all="raise"):
        assert sigmoid(-800.0) == 0.0
        assert sigmoid(800.0) == 1.0


def test_rng_determinism():
    a, b = Rng(42), Rng(42)
    np.testing.assert_array_equal(a.uniform(0, 1, 10_000), b.uniform(0, 1, 10_000))
    assert not np.array_equal(Rng(1).uniform(0, 1, 10), Rng(2).uniform(0, 1, 10))
