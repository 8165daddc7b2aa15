"""Tensor-train format: TTSVD and its nonnegative alternating-projection solver.

TTSVD sweeps left to right over the matricizations of the working tensor,
rank-truncating each one: the left factor of truncation k is reshaped into
the k-th TT core and the compressed remainder continues the sweep. The
output is left-orthogonal (the tall unfolding of ``first`` and of every
interior core has orthonormal columns), obeys the discarded-singular-value
identity

    ||X - X_tt||_F^2 = sum_k sum_{i > r_k} sigma_i(Z_k)^2

for the deterministic backend (Z_k the k-th intermediate), and is
quasioptimal within sqrt(d-1) of the best TT approximation at those ranks.

The order-2 case degenerates to plain truncated-SVD matrix approximation,
which doubles as a cross-check against the matrix alternating-projection
literature.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ._validation import as_tensor, check_index, check_positive_int, check_ranks
from .sketching import SeedStream, TruncationStrategy, truncate_rank
from .tensor_ops import nonneg_project
from .trace import ConvergenceTrace, measure_iterate

__all__ = ["TTDecomposition", "ttsvd", "tt_reconstruct", "tt_element", "nonneg_ttsvd"]


@dataclass
class TTDecomposition:
    """TT factors: boundary matrices plus interior 3-D cores.

    ``first`` is n_1 x r_1, interior core k (for modes 2..d-1) has shape
    (r_{k-1}, n_k, r_k), and ``last`` is r_{d-1} x n_d. For d == 2 the
    interior is empty and the decomposition is the product first @ last.
    """

    first: np.ndarray
    cores: List[np.ndarray]
    last: np.ndarray

    def __post_init__(self):
        if self.first.ndim != 2 or self.last.ndim != 2:
            raise ValueError("boundary factors must be matrices")
        left = self.first.shape[1]
        for i, G in enumerate(self.cores):
            if G.ndim != 3:
                raise ValueError(f"interior core {i} must be 3-D, got {G.ndim}-D")
            if G.shape[0] != left:
                raise ValueError("adjacent TT ranks do not chain")
            left = G.shape[2]
        if self.last.shape[0] != left:
            raise ValueError("adjacent TT ranks do not chain")

    @property
    def order(self) -> int:
        return len(self.cores) + 2

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.first.shape[0],) + tuple(G.shape[1] for G in self.cores) + (self.last.shape[1],)

    @property
    def ranks(self) -> Tuple[int, ...]:
        return (self.first.shape[1],) + tuple(G.shape[2] for G in self.cores)


def ttsvd(
    X,
    ranks,
    strategy: Optional[TruncationStrategy] = None,
    seed_stream: Optional[SeedStream] = None,
    check_finite: bool = True,
) -> TTDecomposition:
    """Sequential SVD sweep producing a left-orthogonal TT decomposition.

    ``ranks`` has d-1 entries, one per matricization; each is clamped to the
    dimensions of the matrix being truncated. See :func:`nnlowrank.tucker.sthosvd`
    for the meaning of ``strategy`` and ``seed_stream``.
    """
    X = as_tensor(X, min_ndim=2, check_finite=check_finite)
    d = X.ndim
    ranks = check_ranks(ranks, d - 1, what="TT ranks")
    if strategy is None:
        strategy = TruncationStrategy.deterministic()
    if strategy.is_randomized and seed_stream is None:
        seed_stream = SeedStream(strategy.seed, "ttsvd")

    shape = X.shape
    Z = X.reshape(shape[0], -1)
    first: Optional[np.ndarray] = None
    cores: List[np.ndarray] = []
    r_prev = 1
    for k in range(1, d):
        rng = seed_stream.next_rng() if strategy.is_randomized else None
        t = truncate_rank(Z, ranks[k - 1], strategy, rng, check_finite=False)
        if k == 1:
            first = t.U
        else:
            cores.append(np.ascontiguousarray(t.U.reshape(r_prev, shape[k - 1], t.rank)))
        r_prev = t.rank
        Z = t.S[:, None] * t.Vt
        if k < d - 1:
            Z = Z.reshape(r_prev * shape[k], -1)
    return TTDecomposition(first=first, cores=cores, last=np.ascontiguousarray(Z))


def tt_reconstruct(T: TTDecomposition) -> np.ndarray:
    """Contract the TT chain left to right into the full tensor, costing
    O(n^d r) operations."""
    shape = T.shape
    M = T.first
    for G in T.cores:
        r_in, n, r_out = G.shape
        M = M @ G.reshape(r_in, n * r_out)
        M = M.reshape(-1, r_out)
    M = M @ T.last
    return np.ascontiguousarray(M.reshape(shape))


def tt_element(T: TTDecomposition, index) -> float:
    """Single element at a 1-based multi-index via the chain of vector-matrix
    products, costing O(d r^2)."""
    index = check_index(index, T.shape)
    v = T.first[index[0] - 1, :]
    for G, i in zip(T.cores, index[1:-1]):
        v = v @ G[:, i - 1, :]
    return float(v @ T.last[:, index[-1] - 1])


def nonneg_ttsvd(
    X,
    ranks,
    iters: int,
    strategy: Optional[TruncationStrategy] = None,
    tol: Optional[float] = None,
) -> Tuple[TTDecomposition, ConvergenceTrace]:
    """Alternating projections between the nonnegative orthant and the set
    of tensors with TT ranks bounded by ``ranks``.

    The TT analogue of :func:`nnlowrank.tucker.nonneg_sthosvd`: each
    iteration applies max(., 0), truncates with TTSVD, and reconstructs by
    the full left-to-right contraction. Trace statistics are computed on the
    reconstructed low-rank iterate.
    """
    X = as_tensor(X, min_ndim=2)
    ranks = check_ranks(ranks, X.ndim - 1, what="TT ranks")
    iters = check_positive_int(iters, "iters")
    if strategy is None:
        strategy = TruncationStrategy.deterministic()
    stream = SeedStream(strategy.seed, "nonneg_ttsvd") if strategy.is_randomized else None

    ref_frob = float(np.linalg.norm(X.ravel()))
    ref_cheb = float(np.abs(X).max())
    if ref_frob == 0.0:
        raise ValueError("cannot approximate the zero tensor")

    trace = ConvergenceTrace()
    work = X
    decomp: Optional[TTDecomposition] = None
    start = time.perf_counter()
    for i in range(1, iters + 1):
        work = nonneg_project(work, check_finite=False)
        decomp = ttsvd(work, ranks, strategy, seed_stream=stream, check_finite=False)
        work = tt_reconstruct(decomp)
        trace.append(measure_iterate(i, work, X, ref_frob, ref_cheb,
                                     time.perf_counter() - start))
        if tol is not None and trace.final.neg_frobenius < tol:
            break
    return decomp, trace
