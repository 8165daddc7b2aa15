"""STHOSVD and the alternating-projection Tucker solver.

The error identity and quasioptimality checks run against an independent
plain-numpy reimplementation of the sequential truncation sweep, so the
library and the oracle share no code beyond numpy itself.
"""

import numpy as np
import pytest

from nnlowrank import (
    TruncationStrategy,
    TuckerDecomposition,
    nonneg_sthosvd,
    sthosvd,
    tucker_element,
    tucker_reconstruct,
)

from conftest import random_tensor


def sthosvd_oracle(X, ranks):
    """Sequential mode-ascending truncation with raw numpy reshapes.

    Returns the approximant and the root of the accumulated discarded
    sigma^2, which the sequential-truncation error identity says equals
    the reconstruction error exactly.
    """
    work = X.copy()
    factors = []
    err2 = 0.0
    for k in range(X.ndim):
        M = np.moveaxis(work, k, 0).reshape(work.shape[k], -1)
        U, S, Vt = np.linalg.svd(M, full_matrices=False)
        r = min(ranks[k], len(S))
        err2 += float((S[r:] ** 2).sum())
        factors.append(U[:, :r])
        compressed = (S[:r, None] * Vt[:r]).reshape(
            (r,) + work.shape[:k] + work.shape[k + 1:])
        work = np.moveaxis(compressed, 0, k)
    Y = work
    for k, U in enumerate(factors):
        Y = np.moveaxis(np.tensordot(Y, U, axes=([k], [1])), -1, k)
    return Y, float(np.sqrt(err2))


@pytest.mark.parametrize("shape,ranks", [
    ((7, 6, 5), (3, 2, 4)),
    ((5, 5, 5), (2, 2, 2)),
    ((4, 6, 3, 5), (2, 3, 2, 2)),
    ((9, 4), (3, 2)),
])
def test_sthosvd_matches_oracle(shape, ranks):
    X = random_tensor(shape, seed=17)
    T = sthosvd(X, ranks)
    Y = tucker_reconstruct(T)
    Y_oracle, err_oracle = sthosvd_oracle(X, ranks)
    np.testing.assert_allclose(Y, Y_oracle, atol=1e-9)
    err = np.linalg.norm(X - Y)
    assert err == pytest.approx(err_oracle, rel=1e-9, abs=1e-12)


def test_sthosvd_structure_and_orthonormal_factors():
    X = random_tensor((8, 7, 6), seed=1)
    T = sthosvd(X, (3, 4, 2))
    assert T.ranks == (3, 4, 2)
    assert T.shape == (8, 7, 6)
    assert T.core.shape == (3, 4, 2)
    for U, (n, r) in zip(T.factors, [(8, 3), (7, 4), (6, 2)]):
        assert U.shape == (n, r)
        np.testing.assert_allclose(U.T @ U, np.eye(r), atol=1e-10)


def test_sthosvd_exact_rank_recovery():
    g = np.random.default_rng(0)
    core = g.standard_normal((2, 3, 2))
    Us = [np.linalg.qr(g.standard_normal((n, r)))[0]
          for n, r in [(7, 2), (8, 3), (6, 2)]]
    X = core
    for k, U in enumerate(Us):
        X = np.moveaxis(np.tensordot(X, U, axes=([k], [1])), -1, k)
    Y = tucker_reconstruct(sthosvd(X, (2, 3, 2)))
    np.testing.assert_allclose(Y, X, atol=1e-10)


def test_sthosvd_quasioptimality_vs_tail_bound():
    # reconstruction error never exceeds sqrt(d) times the best possible,
    # certified through the max-over-modes discarded-sigma lower bound
    for seed, shape, ranks in [(0, (7, 6, 5), (2, 2, 2)),
                               (1, (6, 6, 6), (3, 1, 2)),
                               (2, (4, 5, 3, 4), (2, 2, 2, 2))]:
        X = random_tensor(shape, seed=seed)
        err = np.linalg.norm(X - tucker_reconstruct(sthosvd(X, ranks)))
        tails = []
        for k in range(len(shape)):
            M = np.moveaxis(X, k, 0).reshape(shape[k], -1)
            S = np.linalg.svd(M, compute_uv=False)
            tails.append(np.sqrt((S[ranks[k]:] ** 2).sum()))
        lower = max(tails)  # no rank-constrained approximant beats this
        assert err <= np.sqrt(len(shape)) * lower + 1e-12


def test_sthosvd_rank_validation():
    X = random_tensor((4, 4, 4))
    with pytest.raises(ValueError):
        sthosvd(X, (2, 2))
    with pytest.raises(ValueError):
        sthosvd(X, (2, 0, 2))


def test_tucker_reconstruct_and_element_agree():
    X = random_tensor((5, 4, 6), seed=9)
    T = sthosvd(X, (2, 3, 2))
    Y = tucker_reconstruct(T)
    # spot-check every entry through the 1-based element evaluator
    for idx in [(1, 1, 1), (5, 4, 6), (3, 2, 5)]:
        zero_based = tuple(i - 1 for i in idx)
        assert tucker_element(T, idx) == pytest.approx(Y[zero_based], abs=1e-12)
    with pytest.raises(IndexError):
        tucker_element(T, (0, 1, 1))  # indices are 1-based
    with pytest.raises(IndexError):
        tucker_element(T, (6, 1, 1))


def test_tucker_decomposition_validation():
    core = np.zeros((2, 2))
    with pytest.raises(ValueError):
        TuckerDecomposition(core=core, factors=[np.zeros((4, 2))])
    with pytest.raises(ValueError):
        TuckerDecomposition(core=core,
                            factors=[np.zeros((4, 2)), np.zeros((4, 3))])


def test_sthosvd_matrix_case_equals_svd_truncation():
    A = random_tensor((9, 7), seed=4)
    Y = tucker_reconstruct(sthosvd(A, (3, 3)))
    U, S, Vt = np.linalg.svd(A, full_matrices=False)
    np.testing.assert_allclose(Y, (U[:, :3] * S[:3]) @ Vt[:3], atol=1e-10)


# --- alternating projections ---------------------------------------------


def test_nonneg_sthosvd_trace_and_improvement():
    # spiky nonnegative data, so plain truncation genuinely overshoots
    # below zero and the alternating projections have work to do
    from nnlowrank import derive_rng
    X = derive_rng(0, "spiky", 0).uniform(0, 1, (12, 12, 12)) ** 4
    T, trace = nonneg_sthosvd(X, (3, 3, 3), 25)
    assert len(trace) == 25
    assert [row.iteration for row in trace] == list(range(1, 26))
    assert trace[0].neg_frobenius > 0
    assert trace.final.neg_frobenius < trace[0].neg_frobenius / 50
    assert 0.0 < trace.final.rel_err_frobenius < 1.0
    Y = tucker_reconstruct(T)
    got = np.linalg.norm(X - Y) / np.linalg.norm(X)
    assert got == pytest.approx(trace.final.rel_err_frobenius, rel=1e-9)
    # elapsed seconds accumulate
    el = trace.column("elapsed_s")
    assert (np.diff(el) >= 0).all()


def test_nonneg_sthosvd_deterministic_rerun_is_bitwise(hilbert_16):
    T1, tr1 = nonneg_sthosvd(hilbert_16, (3, 2, 4), 10)
    T2, tr2 = nonneg_sthosvd(hilbert_16, (3, 2, 4), 10)
    np.testing.assert_array_equal(T1.core, T2.core)
    for a, b in zip(T1.factors, T2.factors):
        np.testing.assert_array_equal(a, b)
    for r1, r2 in zip(tr1, tr2):
        assert r1.neg_frobenius == r2.neg_frobenius
        assert r1.rel_err_frobenius == r2.rel_err_frobenius


def test_nonneg_sthosvd_sketched_rerun_is_bitwise(hilbert_16):
    strat = TruncationStrategy(kind="hmt", k=8, p=1, seed=5)
    T1, tr1 = nonneg_sthosvd(hilbert_16, (3, 2, 4), 8, strategy=strat)
    T2, tr2 = nonneg_sthosvd(hilbert_16, (3, 2, 4), 8, strategy=strat)
    np.testing.assert_array_equal(T1.core, T2.core)
    assert [r.neg_frobenius for r in tr1] == [r.neg_frobenius for r in tr2]
    # a different seed must change the iterates
    T3, _ = nonneg_sthosvd(hilbert_16, (3, 2, 4), 8,
                           strategy=TruncationStrategy(kind="hmt", k=8, p=1, seed=6))
    assert not np.array_equal(T1.core, T3.core)


def test_nonneg_sthosvd_tol_stops_early(hilbert_16):
    T, trace = nonneg_sthosvd(hilbert_16, (3, 2, 4), 500, tol=1e-6)
    assert len(trace) < 500
    assert trace.final.neg_frobenius < 1e-6


def test_nonneg_sthosvd_rejects_zero_reference():
    with pytest.raises(ValueError):
        nonneg_sthosvd(np.zeros((4, 4, 4)), (2, 2, 2), 3)
