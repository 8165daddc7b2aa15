"""Reshaping algebra against brute-force index arithmetic oracles."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nnlowrank import (
    chebyshev_norm,
    fold,
    frobenius_inner,
    frobenius_norm,
    matricize,
    mode_k_product,
    negativity_stats,
    nonneg_project,
    unfold,
)

from conftest import random_tensor

SHAPES = [
    (4,),
    (3, 5),
    (2, 3, 4),
    (4, 4, 4),
    (5, 2, 3, 4),
    (2, 3, 4, 5),
    (4, 4, 4, 4),
    (1, 3, 1, 2),
]


def unfold_oracle(X, k):
    """Mode-k unfolding by explicit index arithmetic, no axis permutation
    primitives. Column index enumerates the remaining modes in original
    order, last varying fastest."""
    shape = X.shape
    rest = [n for j, n in enumerate(shape) if j != k - 1]
    M = np.zeros((shape[k - 1], int(np.prod(rest, dtype=np.int64))))
    for idx in itertools.product(*(range(n) for n in shape)):
        col = 0
        for j, n in enumerate(shape):
            if j == k - 1:
                continue
            col = col * n + idx[j]
        M[idx[k - 1], col] = X[idx]
    return M


@pytest.mark.parametrize("shape", SHAPES)
def test_unfold_matches_bruteforce(shape):
    X = random_tensor(shape, seed=11)
    for k in range(1, len(shape) + 1):
        got = unfold(X, k)
        want = unfold_oracle(X, k)
        assert got.shape == want.shape
        np.testing.assert_array_equal(got, want)


@pytest.mark.parametrize("shape", SHAPES)
def test_fold_inverts_unfold(shape):
    X = random_tensor(shape, seed=5)
    for k in range(1, len(shape) + 1):
        np.testing.assert_array_equal(fold(unfold(X, k), k, shape), X)


def test_unfold_mode_out_of_range():
    X = random_tensor((3, 4, 5))
    for bad in (0, 4, -1):
        with pytest.raises(ValueError):
            unfold(X, bad)


def test_fold_shape_mismatch():
    M = np.zeros((3, 20))
    with pytest.raises(ValueError):
        fold(M, 1, (3, 4, 4))


def test_matricize_is_pure_reshape():
    X = random_tensor((3, 4, 5, 2), seed=2)
    for k in range(1, 4):
        rows = int(np.prod(X.shape[:k]))
        np.testing.assert_array_equal(matricize(X, k), X.reshape(rows, -1))
    with pytest.raises(ValueError):
        matricize(X, 4)  # split must leave at least one trailing mode


def mode_product_oracle(X, U, k):
    shape = list(X.shape)
    shape[k - 1] = U.shape[0]
    out = np.zeros(shape)
    for idx in itertools.product(*(range(n) for n in out.shape)):
        s = 0.0
        src = list(idx)
        for j in range(U.shape[1]):
            src[k - 1] = j
            s += U[idx[k - 1], j] * X[tuple(src)]
        out[idx] = s
    return out


@pytest.mark.parametrize("shape", [(3, 4, 5), (2, 3, 2, 4)])
def test_mode_k_product_matches_bruteforce(shape):
    X = random_tensor(shape, seed=7)
    for k in range(1, len(shape) + 1):
        U = random_tensor((6, shape[k - 1]), seed=50 + k)
        got = mode_k_product(X, U, k)
        np.testing.assert_allclose(got, mode_product_oracle(X, U, k), atol=1e-12)
        # defining relation
        np.testing.assert_allclose(unfold(got, k), U @ unfold(X, k), atol=1e-12)


def test_mode_k_product_dimension_check():
    X = random_tensor((3, 4, 5))
    with pytest.raises(ValueError):
        mode_k_product(X, np.zeros((2, 3)), 2)


def test_mode_products_commute_across_modes():
    X = random_tensor((4, 5, 6), seed=3)
    A = random_tensor((2, 4), seed=31)
    B = random_tensor((3, 6), seed=32)
    left = mode_k_product(mode_k_product(X, A, 1), B, 3)
    right = mode_k_product(mode_k_product(X, B, 3), A, 1)
    np.testing.assert_allclose(left, right, atol=1e-12)


def test_norms_and_inner():
    X = np.array([[1.0, -2.0], [2.0, 4.0]])
    assert frobenius_norm(X) == pytest.approx(5.0)
    assert chebyshev_norm(X) == pytest.approx(4.0)
    Y = np.ones((2, 2))
    assert frobenius_inner(X, Y) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        frobenius_inner(X, np.ones((2, 3)))


def test_nonneg_project_basics():
    X = np.array([[-1.0, 0.0], [2.0, -3.0]])
    np.testing.assert_array_equal(nonneg_project(X), [[0.0, 0.0], [2.0, 0.0]])


def test_negativity_stats_values():
    X = np.array([[-3.0, 0.0], [4.0, -4.0]])
    s = negativity_stats(X)
    assert s.frobenius == pytest.approx(5.0)
    assert s.chebyshev == pytest.approx(4.0)
    assert s.fraction == pytest.approx(0.5)
    z = negativity_stats(np.ones((2, 2)))
    assert (z.frobenius, z.chebyshev, z.fraction) == (0.0, 0.0, 0.0)


def test_validation_rejects_nonfinite():
    X = np.full((2, 2), np.nan)
    with pytest.raises(ValueError):
        unfold(X, 1)
    # explicit opt-out used by inner solver loops
    assert unfold(X, 1, check_finite=False).shape == (2, 2)


@st.composite
def tensors(draw):
    shape = tuple(draw(st.lists(st.integers(1, 5), min_size=1, max_size=4)))
    n = int(np.prod(shape))
    vals = draw(st.lists(st.floats(-1e6, 1e6), min_size=n, max_size=n))
    return np.array(vals).reshape(shape)


@settings(max_examples=60, deadline=None)
@given(tensors(), st.data())
def test_fold_unfold_roundtrip_property(X, data):
    k = data.draw(st.integers(1, X.ndim))
    np.testing.assert_array_equal(fold(unfold(X, k), k, X.shape), X)


@settings(max_examples=60, deadline=None)
@given(tensors())
def test_nonneg_project_properties(X):
    P = nonneg_project(X)
    assert (P >= 0).all()
    np.testing.assert_array_equal(nonneg_project(P), P)
    # projection never moves a point farther than the identity would
    assert frobenius_norm(X - P) <= frobenius_norm(X) + 1e-12


@st.composite
def tensor_pairs(draw):
    shape = tuple(draw(st.lists(st.integers(1, 5), min_size=1, max_size=4)))
    n = int(np.prod(shape))
    vals = st.lists(st.floats(-1e6, 1e6), min_size=n, max_size=n)
    return (np.array(draw(vals)).reshape(shape),
            np.array(draw(vals)).reshape(shape))


@settings(max_examples=40, deadline=None)
@given(tensor_pairs())
def test_nonneg_project_is_1_lipschitz(pair):
    X, Y = pair
    d_proj = frobenius_norm(nonneg_project(X) - nonneg_project(Y))
    assert d_proj <= frobenius_norm(X - Y) + 1e-9
