"""Dense tensor reshaping algebra, norms, and the nonnegative projection.

Tensors are plain ``numpy.ndarray`` objects of 64-bit reals in row-major
(C) order, the last index varying fastest. Mode and split indices in the
public API are 1-based, matching the standard multilinear-algebra
convention; element storage is NumPy's usual 0-based indexing.

The mode-k unfolding of a tensor X of shape (n_1, ..., n_d) is the
n_k x (prod_{j != k} n_j) matrix obtained by permuting mode k to the front
and reshaping; the k-th matricization is the (n_1...n_k) x (n_{k+1}...n_d)
matrix given by a pure reshape with no permutation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import as_matrix, as_tensor, check_mode, check_split

__all__ = [
    "NegativityStats",
    "unfold",
    "fold",
    "matricize",
    "mode_k_product",
    "frobenius_norm",
    "chebyshev_norm",
    "frobenius_inner",
    "nonneg_project",
    "negativity_stats",
]


@dataclass(frozen=True)
class NegativityStats:
    """Summary of the negative part of a tensor.

    Attributes
    ----------
    frobenius : float
        Frobenius norm of min(X, 0), i.e. of the negative part.
    chebyshev : float
        Largest magnitude among strictly negative entries, 0 if none.
    fraction : float
        Share of strictly negative entries, in [0, 1].
    """

    frobenius: float
    chebyshev: float
    fraction: float

    def __post_init__(self):
        if self.frobenius < 0 or self.chebyshev < 0:
            raise ValueError("negativity norms must be nonnegative")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("fraction must lie in [0, 1]")


def unfold(X, k: int, check_finite: bool = True) -> np.ndarray:
    """Mode-k unfolding of a tensor.

    Mode ``k`` (1-based) is moved to the front and the remaining modes are
    flattened in their original order, so the result has ``n_k`` rows and
    ``prod_{j != k} n_j`` columns.

    Parameters
    ----------
    X : array_like
        Tensor of order d >= 1.
    k : int
        Mode index, 1 <= k <= d.

    Returns
    -------
    numpy.ndarray
        The unfolding as a contiguous 2-D array.

    Examples
    --------
    >>> X = np.arange(6.0).reshape(2, 3)
    >>> unfold(X, 1)
    array([[0., 1., 2.],
           [3., 4., 5.]])
    >>> unfold(X, 2)
    array([[0., 3.],
           [1., 4.],
           [2., 5.]])
    """
    X = as_tensor(X, check_finite=check_finite)
    k = check_mode(k, X.ndim)
    return np.ascontiguousarray(np.moveaxis(X, k - 1, 0).reshape(X.shape[k - 1], -1))


def fold(M, k: int, shape, check_finite: bool = True) -> np.ndarray:
    """Inverse of :func:`unfold`: rebuild the tensor of ``shape`` from its
    mode-k unfolding. ``fold(unfold(X, k), k, X.shape)`` is exact.
    """
    M = as_matrix(M, name="M", check_finite=check_finite)
    shape = tuple(int(n) for n in shape)
    k = check_mode(k, len(shape))
    rest = shape[: k - 1] + shape[k:]
    expected = (shape[k - 1], int(np.prod(rest, dtype=np.int64)) if rest else 1)
    if M.shape != expected:
        raise ValueError(f"matrix shape {M.shape} does not match mode-{k} unfolding of {shape}")
    return np.ascontiguousarray(np.moveaxis(M.reshape((shape[k - 1],) + rest), 0, k - 1))


def matricize(X, k: int) -> np.ndarray:
    """k-th matricization: reshape splitting the first k modes against the
    rest, with no permutation of the row-major data.

    Parameters
    ----------
    X : array_like
        Tensor of order d >= 2.
    k : int
        Split index, 1 <= k <= d-1. Rows enumerate the first k indices.
    """
    X = as_tensor(X, min_ndim=2)
    k = check_split(k, X.ndim)
    rows = int(np.prod(X.shape[:k], dtype=np.int64))
    return X.reshape(rows, -1)


def mode_k_product(X, U, k: int, check_finite: bool = True) -> np.ndarray:
    """Mode-k product X x_k U, contracting U's columns with mode k of X.

    Defined by the relation ``unfold(result, k) == U @ unfold(X, k)``; the
    result replaces extent ``n_k`` by ``U.shape[0]``.
    """
    X = as_tensor(X, check_finite=check_finite)
    U = as_matrix(U, name="U", check_finite=check_finite)
    k = check_mode(k, X.ndim)
    if U.shape[1] != X.shape[k - 1]:
        raise ValueError(
            f"U has {U.shape[1]} columns but mode {k} of X has extent {X.shape[k - 1]}"
        )
    # tensordot contracts mode k with U's columns and appends the new axis
    # at the end; move it back into place.
    out = np.tensordot(X, U, axes=([k - 1], [1]))
    return np.ascontiguousarray(np.moveaxis(out, -1, k - 1))


def frobenius_norm(X) -> float:
    X = as_tensor(X)
    return float(np.linalg.norm(X.ravel()))


def chebyshev_norm(X) -> float:
    """Entry of maximum magnitude."""
    X = as_tensor(X)
    return float(np.abs(X).max())


def frobenius_inner(X, Y) -> float:
    X = as_tensor(X)
    Y = as_tensor(Y, name="Y")
    if X.shape != Y.shape:
        raise ValueError(f"shape mismatch: {X.shape} vs {Y.shape}")
    return float(np.dot(X.ravel(), Y.ravel()))


def nonneg_project(X, check_finite: bool = True) -> np.ndarray:
    """Entry-wise projection onto the nonnegative orthant, max(X, 0).

    This is the unique Frobenius-nearest nonnegative tensor.
    """
    X = as_tensor(X, check_finite=check_finite)
    return np.maximum(X, 0.0)


def negativity_stats(X) -> NegativityStats:
    """Frobenius and Chebyshev norms of the negative part and the fraction
    of strictly negative entries.

    Notes
    -----
    The norms are absolute, i.e. not normalized by any reference tensor.
    Convergence traces report them divided by the norms of the tensor being
    approximated so that the columns are directly comparable with relative
    errors; see :class:`nnlowrank.trace.ConvergenceTrace`.
    """
    X = as_tensor(X)
    neg = np.minimum(X, 0.0)
    frob = float(np.linalg.norm(neg.ravel()))
    cheb = float(-neg.min()) + 0.0  # avoid IEEE -0.0 for nonnegative input
    fraction = float(np.count_nonzero(X < 0.0) / X.size)
    return NegativityStats(frobenius=frob, chebyshev=cheb, fraction=fraction)
