"""Tucker format: STHOSVD and its nonnegative alternating-projection solver.

The sequentially truncated higher-order SVD (STHOSVD) truncates the working
tensor one mode at a time in ascending mode order, so each later mode sees a
tensor already shrunk in the earlier modes. With the deterministic backend
the reconstruction error obeys the discarded-singular-value identity

    ||X - X_approx||_F^2 = sum_k sum_{i > r_k} sigma_i(W_k)^2

where W_k is the mode-k unfolding of the k-th intermediate, and the result
is quasioptimal within sqrt(d) of the best Tucker approximation at the same
ranks.

``nonneg_sthosvd`` alternates the nonnegative-orthant projection max(., 0)
with STHOSVD truncation, tracking per-iteration negativity and error
statistics of the reconstructed low-rank iterate.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ._validation import as_tensor, check_index, check_positive_int, check_ranks
from .sketching import SeedStream, TruncationStrategy, truncate_rank
from .tensor_ops import fold, mode_k_product, nonneg_project, unfold
from .trace import ConvergenceTrace, measure_iterate

__all__ = ["TuckerDecomposition", "sthosvd", "tucker_reconstruct", "tucker_element", "nonneg_sthosvd"]


@dataclass
class TuckerDecomposition:
    """Core tensor of shape (r_1, ..., r_d) plus d factor matrices, factor k
    of shape n_k x r_k with orthonormal columns."""

    core: np.ndarray
    factors: List[np.ndarray]

    def __post_init__(self):
        if self.core.ndim != len(self.factors):
            raise ValueError("core order must equal the number of factors")
        for k, (r, U) in enumerate(zip(self.core.shape, self.factors), start=1):
            if U.ndim != 2 or U.shape[1] != r:
                raise ValueError(f"factor {k} shape {U.shape} does not match core extent {r}")

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(U.shape[0] for U in self.factors)

    @property
    def ranks(self) -> Tuple[int, ...]:
        return tuple(self.core.shape)


def sthosvd(
    X,
    ranks,
    strategy: Optional[TruncationStrategy] = None,
    seed_stream: Optional[SeedStream] = None,
    check_finite: bool = True,
) -> TuckerDecomposition:
    """Sequentially truncated higher-order SVD.

    Modes are processed in ascending order 1..d. At mode k the working
    tensor's mode-k unfolding is rank-truncated with the selected backend;
    the left factor becomes U_k and the compressed remainder
    diag(S) @ Vt is folded back as the new working tensor.

    Parameters
    ----------
    X : array_like
        Tensor to approximate.
    ranks : sequence of int
        Target multilinear ranks (r_1, ..., r_d); entries are clamped to the
        working tensor's unfolding dimensions.
    strategy : TruncationStrategy, optional
        Rank-truncation backend; deterministic when omitted.
    seed_stream : SeedStream, optional
        Existing derivation stream for sketch randomness. Supplied by
        iterative callers so that every truncation in a solve draws a fresh,
        reproducible sketch; when omitted a stream is derived from
        ``strategy.seed``.
    check_finite : bool
        Whether to reject NaN/Inf input; iterative callers that feed back
        their own output pass False.
    """
    X = as_tensor(X, check_finite=check_finite)
    ranks = check_ranks(ranks, X.ndim)
    if strategy is None:
        strategy = TruncationStrategy.deterministic()
    if strategy.is_randomized and seed_stream is None:
        seed_stream = SeedStream(strategy.seed, "sthosvd")

    work = X
    factors: List[np.ndarray] = []
    for k, r in enumerate(ranks, start=1):
        Wk = unfold(work, k, check_finite=False)
        rng = seed_stream.next_rng() if strategy.is_randomized else None
        t = truncate_rank(Wk, r, strategy, rng, check_finite=False)
        factors.append(t.U)
        new_shape = list(work.shape)
        new_shape[k - 1] = t.rank
        work = fold(t.S[:, None] * t.Vt, k, tuple(new_shape), check_finite=False)
    return TuckerDecomposition(core=work, factors=factors)


def tucker_reconstruct(T: TuckerDecomposition) -> np.ndarray:
    """Evaluate the full tensor core x_1 U_1 x_2 ... x_d U_d by chained
    mode products."""
    out = T.core
    for k, U in enumerate(T.factors, start=1):
        out = mode_k_product(out, U, k, check_finite=False)
    return out


def tucker_element(T: TuckerDecomposition, index) -> float:
    """Single element at a 1-based multi-index without full reconstruction.

    Contracts the core with one row of each factor, costing O(prod r_k)
    operations rather than O(prod n_k) memory.
    """
    index = check_index(index, T.shape)
    out = T.core
    for i, U in zip(index, T.factors):
        out = np.tensordot(U[i - 1, :], out, axes=([0], [0]))
    return float(out)


def nonneg_sthosvd(
    X,
    ranks,
    iters: int,
    strategy: Optional[TruncationStrategy] = None,
    tol: Optional[float] = None,
) -> Tuple[TuckerDecomposition, ConvergenceTrace]:
    """Alternating projections between the nonnegative orthant and the set
    of tensors with multilinear rank bounded by ``ranks``.

    Each iteration projects the working tensor onto the orthant with
    max(., 0), truncates with STHOSVD, and reconstructs. The input itself is
    projected before the first truncation, so callers need not pass a
    nonnegative tensor. Trace statistics are computed on the reconstructed
    low-rank iterate; see :mod:`nnlowrank.trace` for column semantics.

    Parameters
    ----------
    tol : float, optional
        Early stop once the trace's (normalized) negativity Frobenius column
        falls below this value. Disabled by default: the solver runs exactly
        ``iters`` iterations.

    Returns
    -------
    (TuckerDecomposition, ConvergenceTrace)
    """
    X = as_tensor(X)
    ranks = check_ranks(ranks, X.ndim)
    iters = check_positive_int(iters, "iters")
    if strategy is None:
        strategy = TruncationStrategy.deterministic()
    stream = SeedStream(strategy.seed, "nonneg_sthosvd") if strategy.is_randomized else None

    ref_frob = float(np.linalg.norm(X.ravel()))
    ref_cheb = float(np.abs(X).max())
    if ref_frob == 0.0:
        raise ValueError("cannot approximate the zero tensor")

    trace = ConvergenceTrace()
    work = X
    decomp: Optional[TuckerDecomposition] = None
    start = time.perf_counter()
    for i in range(1, iters + 1):
        work = nonneg_project(work, check_finite=False)
        decomp = sthosvd(work, ranks, strategy, seed_stream=stream, check_finite=False)
        work = tucker_reconstruct(decomp)
        trace.append(measure_iterate(i, work, X, ref_frob, ref_cheb,
                                     time.perf_counter() - start))
        if tol is not None and trace.final.neg_frobenius < tol:
            break
    return decomp, trace
