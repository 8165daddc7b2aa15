"""Deterministic and randomized truncated SVDs with Rademacher sketches.

Three interchangeable rank-truncation backends are provided:

* ``truncated_svd`` - the exact Frobenius-optimal truncation (Eckart-Young),
* ``hmt_svd`` - randomized range finder with optional power iterations
  followed by an SVD of the small projected matrix (Halko-Martinsson-Tropp),
* ``tropp_svd`` - two-sided sketch whose core factor is recovered through a
  triangular solve (Tropp-Yurtsever-Udell-Cevher).

A :class:`TruncationStrategy` value selects the backend wherever a rank
truncation appears inside the tensor algorithms. All randomness flows
through counter-based Philox generators seeded as
``hash(seed, call-site label, call index)``, which makes every experiment
bitwise reproducible for a fixed seed while keeping independent call sites
statistically independent.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from ._validation import as_matrix, check_positive_int

__all__ = [
    "RankDeficientSketchError",
    "TruncationStrategy",
    "TruncatedSVD",
    "SeedStream",
    "derive_rng",
    "truncated_svd",
    "rademacher_matrix",
    "randomized_range",
    "hmt_svd",
    "tropp_svd",
    "truncate_rank",
]

_MASK64 = (1 << 64) - 1


class RankDeficientSketchError(np.linalg.LinAlgError):
    """Raised when a sketch matrix is numerically rank-deficient.

    Signals an ill-conditioned random sketch; callers may retry with a new
    seed. Never raised by the deterministic backend.
    """


def derive_rng(seed: int, label: str, index: int) -> np.random.Generator:
    """Derive an independent generator from (seed, call-site label, index).

    The triple is fed to ``numpy.random.SeedSequence``, so distinct labels
    and indices yield statistically independent Philox streams, and the
    derivation is stable across platforms and processes.
    """
    entropy = [int(seed) & _MASK64, zlib.crc32(label.encode("utf-8")), int(index)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


class SeedStream:
    """Stateful sequence of derived generators for one call site.

    Each ``next_rng()`` call advances the call index, so consecutive sketch
    draws inside a solver loop receive fresh, reproducible streams.
    """

    def __init__(self, seed: int, label: str):
        self.seed = int(seed)
        self.label = label
        self._index = 0

    def next_rng(self) -> np.random.Generator:
        rng = derive_rng(self.seed, self.label, self._index)
        self._index += 1
        return rng


@dataclass(frozen=True)
class TruncationStrategy:
    """Tagged choice of rank-truncation backend.

    Attributes
    ----------
    kind : {"deterministic", "hmt", "tropp"}
    k : int, optional
        Range sketch size (hmt and tropp). Must satisfy k >= target rank at
        call time; silently clamped to min(m, n) of the matrix at hand.
    p : int
        Power (subspace) iterations for hmt, >= 0.
    l : int, optional
        Co-range sketch size for tropp, l >= k.
    seed : int
        64-bit seed from which all sketch randomness is derived.
    """

    kind: str
    k: Optional[int] = None
    p: int = 0
    l: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("deterministic", "hmt", "tropp"):
            raise ValueError(f"unknown truncation kind: {self.kind!r}")
        if self.kind == "hmt":
            check_positive_int(self.k, "k")
            check_positive_int(self.p, "p", minimum=0)
        elif self.kind == "tropp":
            check_positive_int(self.k, "k")
            check_positive_int(self.l, "l")
            if self.l < self.k:
                raise ValueError(f"tropp requires l >= k, got k={self.k}, l={self.l}")

    @classmethod
    def deterministic(cls) -> "TruncationStrategy":
        return cls(kind="deterministic")

    @classmethod
    def hmt(cls, p: int, k: int, seed: int = 0) -> "TruncationStrategy":
        return cls(kind="hmt", k=k, p=p, seed=seed)

    @classmethod
    def tropp(cls, k: int, l: int, seed: int = 0) -> "TruncationStrategy":
        return cls(kind="tropp", k=k, l=l, seed=seed)

    @property
    def is_randomized(self) -> bool:
        return self.kind != "deterministic"

    def describe(self) -> str:
        if self.kind == "hmt":
            return f"HMT({self.p}, {self.k})"
        if self.kind == "tropp":
            return f"Tropp({self.k}, {self.l})"
        return "SVD"

    def tag(self) -> str:
        """Compact identifier safe for CSV fields and file names."""
        if self.kind == "hmt":
            return f"hmt-p{self.p}-k{self.k}"
        if self.kind == "tropp":
            return f"tropp-k{self.k}-l{self.l}"
        return "det"


@dataclass
class TruncatedSVD:
    """Rank-r factorization U @ diag(S) @ Vt.

    U has orthonormal columns and Vt orthonormal rows (within 1e-12); S is
    nonincreasing and nonnegative. Zero singular values are retained so the
    factor always has exactly min(r, min(m, n)) columns.
    """

    U: np.ndarray
    S: np.ndarray
    Vt: np.ndarray

    @property
    def rank(self) -> int:
        return self.S.shape[0]

    def matrix(self) -> np.ndarray:
        return (self.U * self.S) @ self.Vt


def _fix_signs(U: np.ndarray, Vt: np.ndarray) -> None:
    """Normalize factor signs in place: the largest-magnitude entry of each
    left singular vector is made positive (ties broken by lowest index)."""
    for j in range(U.shape[1]):
        col = U[:, j]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0:
            U[:, j] = -col
            Vt[j, :] = -Vt[j, :]


def truncated_svd(A, r: int, check_finite: bool = True) -> TruncatedSVD:
    """Frobenius-optimal rank-r truncation of A via the full SVD.

    If r exceeds min(m, n) it is clamped. Zero singular values are kept, so
    the output rank is always exactly min(r, min(m, n)).

    Examples
    --------
    >>> t = truncated_svd(np.diag([3.0, 2.0, 1.0]), 2)
    >>> np.round(np.linalg.norm(np.diag([3.0, 2.0, 1.0]) - t.matrix()), 12)
    1.0
    """
    A = as_matrix(A, check_finite=check_finite)
    r = check_positive_int(r, "r")
    r = min(r, min(A.shape))
    U, S, Vt = np.linalg.svd(A, full_matrices=False)
    U, S, Vt = U[:, :r].copy(), S[:r].copy(), Vt[:r, :].copy()
    _fix_signs(U, Vt)
    return TruncatedSVD(U=U, S=S, Vt=Vt)


def rademacher_matrix(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Random matrix with iid +-1 entries, each sign with probability 1/2.

    Entries are drawn from ``rng`` in row-major order, so a fixed generator
    state determines the matrix completely.
    """
    check_positive_int(rows, "rows")
    check_positive_int(cols, "cols")
    return 2.0 * rng.integers(0, 2, size=(rows, cols)).astype(np.float64) - 1.0


def _economic_q(A) -> np.ndarray:
    """Orthonormal basis of A's columns via a thin QR factorization."""
    Q, _ = scipy.linalg.qr(A, mode="economic", check_finite=False)
    return Q


def _wide_svd(Z):
    """Thin SVD of Z, factoring Z^T = W R first when Z is very wide.

    A k x N matrix with N >> k costs LAPACK O(N k^2) at panel speed either
    way, but one QR of Z^T plus a k x k SVD is markedly faster than gesdd on
    the wide matrix, and W @ V keeps the right factor orthonormal.
    """
    m, n = Z.shape
    if n < 4 * m:
        return np.linalg.svd(Z, full_matrices=False)
    W, R = scipy.linalg.qr(Z.T, mode="economic", check_finite=False)
    U, S, Vt = np.linalg.svd(R.T, full_matrices=False)
    return U, S, (W @ Vt.T).T


def randomized_range(A, k: int, p: int, rng: np.random.Generator,
                     check_finite: bool = True) -> np.ndarray:
    """Orthonormal basis approximating the range of A by subspace iteration.

    Sketches A with an n x k Rademacher matrix, orthogonalizes, and applies
    ``p`` two-sided QR refinements, i.e. approximates the range of
    (A A^T)^p A Psi.

    Returns an m x min(k, min(m, n)) matrix with orthonormal columns.
    """
    A = as_matrix(A, check_finite=check_finite)
    check_positive_int(k, "k")
    check_positive_int(p, "p", minimum=0)
    m, n = A.shape
    k = min(k, min(m, n))
    Psi = rademacher_matrix(n, k, rng)
    Q = _economic_q(A @ Psi)
    for _ in range(p):
        Qhat = _economic_q(A.T @ Q)
        Q = _economic_q(A @ Qhat)
    return Q


def hmt_svd(A, r: int, k: int, p: int, rng: np.random.Generator,
            check_finite: bool = True) -> TruncatedSVD:
    """Randomized truncated SVD: project A onto a sketched range basis Q,
    take the exact rank-r SVD of the small matrix Q^T A, and lift the left
    factor back through Q.

    Requires k >= r (k is clamped to min(m, n) first).
    """
    A = as_matrix(A, check_finite=check_finite)
    r = check_positive_int(r, "r")
    m, n = A.shape
    r = min(r, min(m, n))
    k_eff = min(int(k), min(m, n))
    if k_eff < r:
        raise ValueError(f"hmt requires sketch size k >= r, got k={k_eff}, r={r}")
    Q = randomized_range(A, k_eff, p, rng, check_finite=False)
    Z = Q.T @ A
    Uz, S, Vt = _wide_svd(Z)
    U = Q @ Uz[:, :r]
    S = S[:r].copy()
    Vt = Vt[:r, :].copy()
    _fix_signs(U, Vt)
    return TruncatedSVD(U=U, S=S, Vt=Vt)


def tropp_svd(A, r: int, k: int, l: int, rng: np.random.Generator,
              check_finite: bool = True) -> TruncatedSVD:
    """Randomized truncated SVD from two one-pass sketches.

    A range sketch Y = A Psi (Psi n x k) is orthogonalized into Q; a
    co-range sketch Phi (l x m) then determines the core factor as the
    solution of the triangular system T G = P^T Phi A, where Phi Q = P T is
    a thin QR factorization. T is never inverted explicitly. The rank-r SVD
    of G supplies the final factors.

    Requires l >= k >= r. Raises :class:`RankDeficientSketchError` when
    Phi Q is numerically rank-deficient (the caller may retry with a fresh
    seed).
    """
    A = as_matrix(A, check_finite=check_finite)
    r = check_positive_int(r, "r")
    if int(l) < int(k):
        raise ValueError(f"tropp requires l >= k, got k={k}, l={l}")
    m, n = A.shape
    r = min(r, min(m, n))
    k_eff = min(int(k), min(m, n))
    l_eff = int(l)
    if k_eff < r:
        raise ValueError(f"tropp requires sketch size k >= r, got k={k_eff}, r={r}")
    Psi = rademacher_matrix(n, k_eff, rng)
    Phi = rademacher_matrix(l_eff, m, rng)
    Q = _economic_q(A @ Psi)
    W = Phi @ Q
    P, T = scipy.linalg.qr(W, mode="economic", check_finite=False)
    diag = np.abs(np.diag(T))
    if diag.min() <= diag.max() * np.finfo(np.float64).eps * max(l_eff, k_eff):
        raise RankDeficientSketchError(
            "co-range sketch Phi @ Q is numerically rank-deficient; retry with a new seed"
        )
    G = scipy.linalg.solve_triangular(T, P.T @ (Phi @ A), lower=False)
    Ug, S, Vt = _wide_svd(G)
    U = Q @ Ug[:, :r]
    S = S[:r].copy()
    Vt = Vt[:r, :].copy()
    _fix_signs(U, Vt)
    return TruncatedSVD(U=U, S=S, Vt=Vt)


def truncate_rank(
    A,
    r: int,
    strategy: Optional[TruncationStrategy] = None,
    rng: Optional[np.random.Generator] = None,
    check_finite: bool = True,
) -> TruncatedSVD:
    """Apply the rank truncation selected by ``strategy`` to A.

    The single entry point used by the tensor algorithms: dispatches to
    :func:`truncated_svd`, :func:`hmt_svd`, or :func:`tropp_svd`. Randomized
    strategies require ``rng``.
    """
    if strategy is None or strategy.kind == "deterministic":
        return truncated_svd(A, r, check_finite=check_finite)
    if rng is None:
        raise ValueError("randomized truncation strategies require an rng")
    if strategy.kind == "hmt":
        return hmt_svd(A, r, k=strategy.k, p=strategy.p, rng=rng, check_finite=check_finite)
    return tropp_svd(A, r, k=strategy.k, l=strategy.l, rng=rng, check_finite=check_finite)
