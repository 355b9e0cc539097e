"""Bernstein basis weights: identities, stability, and a direct oracle.

The direct oracle evaluates C(n,k) x^k (1-x)^(n-k) with exact integer
binomial coefficients; the library must match it and satisfy the three
moment identities that drive every closed form downstream:

    sum_k p = 1,  sum_k k p = n x,  sum_k k^2 p = n x (1 - x + n x).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import korovkin as kv


def direct_weights(n, x):
    return np.array(
        [math.comb(n, k) * x**k * (1.0 - x) ** (n - k) for k in range(n + 1)]
    )


def test_weights_at_zero_and_one():
    for n in (1, 2, 7, 33):
        w0 = kv.bernstein_weights(n, 0.0)
        w1 = kv.bernstein_weights(n, 1.0)
        expected0 = np.zeros(n + 1)
        expected0[0] = 1.0
        np.testing.assert_array_equal(w0, expected0)
        np.testing.assert_array_equal(w1, expected0[::-1])


def test_weights_order_one_half():
    np.testing.assert_allclose(kv.bernstein_weights(1, 0.5), [0.5, 0.5], atol=1e-15)


def test_weights_order_two_half():
    np.testing.assert_allclose(
        kv.bernstein_weights(2, 0.5), [0.25, 0.5, 0.25], atol=1e-15
    )


def test_weights_match_direct_binomial_evaluation():
    xs = np.linspace(0.0, 1.0, 23)
    for n in (1, 2, 3, 5, 8, 13, 21, 30):
        for x in xs:
            got = kv.bernstein_weights(n, float(x))
            np.testing.assert_allclose(got, direct_weights(n, float(x)), atol=1e-13)


def test_weights_nonnegative_and_normalized_up_to_64():
    xs = np.linspace(0.0, 1.0, 101)
    for n in range(1, 65):
        W = kv.bernstein_weight_matrix(n, xs)
        assert W.shape == (101, n + 1)
        assert W.min() >= 0.0
        np.testing.assert_allclose(W.sum(axis=1), 1.0, atol=1e-12)


def test_first_moment_identity_up_to_64():
    xs = np.linspace(0.0, 1.0, 101)
    k = lambda n: np.arange(n + 1)
    for n in range(1, 65):
        W = kv.bernstein_weight_matrix(n, xs)
        np.testing.assert_allclose(W @ k(n), n * xs, atol=1e-10 * n)


def test_second_moment_identity_up_to_64():
    xs = np.linspace(0.0, 1.0, 101)
    for n in range(1, 65):
        W = kv.bernstein_weight_matrix(n, xs)
        ksq = np.arange(n + 1) ** 2
        np.testing.assert_allclose(W @ ksq, n * xs * (1 - xs + n * xs), atol=1e-9 * n * n)


def test_weights_symmetric_under_reflection():
    # p_{n,k}(x) = p_{n,n-k}(1-x); the two halves of the evaluation
    # (direct recurrence vs reflected recurrence) must agree seamlessly.
    xs = np.linspace(0.0, 1.0, 41)
    for n in (3, 8, 17):
        W = kv.bernstein_weight_matrix(n, xs)
        W_ref = kv.bernstein_weight_matrix(n, 1.0 - xs)
        np.testing.assert_allclose(W, W_ref[:, ::-1], atol=1e-13)


def test_weights_stable_near_endpoints():
    for n in (16, 64, 200):
        for x in (1e-12, 1e-9, 1.0 - 1e-9, 1.0 - 1e-12):
            w = kv.bernstein_weights(n, x)
            assert np.all(np.isfinite(w)) and w.min() >= 0.0
            assert abs(w.sum() - 1.0) <= 1e-12


def test_weights_reject_bad_inputs():
    with pytest.raises(ValueError):
        kv.bernstein_weights(0, 0.5)
    with pytest.raises(ValueError):
        kv.bernstein_weights(3, -0.01)
    with pytest.raises(ValueError):
        kv.bernstein_weights(3, 1.01)


def test_weight_matrix_matches_scalar_weights():
    xs = np.array([0.0, 0.123, 0.5, 0.777, 1.0])
    for n in (1, 4, 9):
        W = kv.bernstein_weight_matrix(n, xs)
        for i, x in enumerate(xs):
            np.testing.assert_array_equal(W[i], kv.bernstein_weights(n, float(x)))


@settings(max_examples=60)
@given(
    n=st.integers(1, 40),
    x=st.floats(0.0, 1.0, allow_nan=False),
)
def test_weights_property_against_oracle(n, x):
    got = kv.bernstein_weights(n, x)
    want = direct_weights(n, x)
    np.testing.assert_allclose(got, want, atol=1e-12)
    assert abs(got.sum() - 1.0) <= 1e-12
