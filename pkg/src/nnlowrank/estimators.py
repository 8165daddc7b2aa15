"""Scikit-learn style estimators wrapping the alternating-projection solvers.

``fit`` computes a nonnegative low-rank decomposition of the training
tensor; ``transform`` projects any same-shape tensor onto the fitted
orthonormal bases (Tucker factor subspaces or the left-orthogonal TT
chain), and ``inverse_transform`` maps coefficients back to a full tensor.
This mirrors the PCA idiom: transform yields compression coefficients,
inverse_transform the reconstruction.

Both classes follow the scikit-learn estimator contract (``get_params``,
``set_params``, trailing-underscore fitted attributes, ``fit_transform``
via the mixin), so they compose with ``sklearn.base.clone`` and pipelines
that pass tensors through untouched.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from ._validation import as_tensor
from .sketching import TruncationStrategy
from .tensor_train import nonneg_ttsvd, tt_reconstruct
from .tucker import nonneg_sthosvd, tucker_reconstruct

__all__ = ["NonnegativeTucker", "NonnegativeTensorTrain"]


def _check_fitted(est, attr: str):
    if not hasattr(est, attr):
        raise NotFittedError(
            f"This {type(est).__name__} instance is not fitted yet; call fit first.")


class NonnegativeTucker(TransformerMixin, BaseEstimator):
    """Nonnegative Tucker approximation via alternating projections.

    Parameters
    ----------
    ranks : tuple of int
        Target multilinear ranks, one per tensor mode.
    iterations : int, default 100
        Alternating-projection iterations.
    strategy : TruncationStrategy, optional
        Rank-truncation backend; deterministic when None.
    tol : float, optional
        Early stop once the normalized negativity Frobenius norm of the
        iterate falls below this value.

    Attributes
    ----------
    decomposition_ : TuckerDecomposition
    trace_ : ConvergenceTrace
    n_iter_ : int
        Iterations actually performed (smaller than ``iterations`` only
        when ``tol`` triggers).
    shape_ : tuple of int
        Shape of the fitted tensor.
    """

    def __init__(self, ranks=None, iterations: int = 100,
                 strategy: Optional[TruncationStrategy] = None,
                 tol: Optional[float] = None):
        self.ranks = ranks
        self.iterations = iterations
        self.strategy = strategy
        self.tol = tol

    def fit(self, X, y=None):
        if self.ranks is None:
            raise ValueError("ranks must be set before fitting")
        X = as_tensor(X)
        decomp, trace = nonneg_sthosvd(X, self.ranks, self.iterations,
                                       strategy=self.strategy, tol=self.tol)
        self.decomposition_ = decomp
        self.trace_ = trace
        self.n_iter_ = len(trace)
        self.shape_ = X.shape
        return self

    def transform(self, X) -> np.ndarray:
        """Project onto the fitted factor subspaces: the core-shaped
        coefficient tensor X x_1 U_1^T x_2 ... x_d U_d^T."""
        _check_fitted(self, "decomposition_")
        X = as_tensor(X)
        if X.shape != self.shape_:
            raise ValueError(f"expected shape {self.shape_}, got {X.shape}")
        out = X
        for k, U in enumerate(self.decomposition_.factors):
            out = np.tensordot(out, U, axes=([k], [0]))  # contract mode k with U columns
            out = np.moveaxis(out, -1, k)
        return np.ascontiguousarray(out)

    def inverse_transform(self, G) -> np.ndarray:
        """Rebuild a full tensor from core-shaped coefficients."""
        _check_fitted(self, "decomposition_")
        G = as_tensor(G)
        if G.shape != self.decomposition_.ranks:
            raise ValueError(f"expected core shape {self.decomposition_.ranks}, got {G.shape}")
        out = G
        for k, U in enumerate(self.decomposition_.factors):
            out = np.tensordot(out, U, axes=([k], [1]))
            out = np.moveaxis(out, -1, k)
        return np.ascontiguousarray(out)

    def reconstruction(self) -> np.ndarray:
        """The fitted low-rank approximant itself."""
        _check_fitted(self, "decomposition_")
        return tucker_reconstruct(self.decomposition_)


class NonnegativeTensorTrain(TransformerMixin, BaseEstimator):
    """Nonnegative tensor-train approximation via alternating projections.

    Parameters as :class:`NonnegativeTucker`, except ``ranks`` holds the
    d-1 TT ranks. ``transform`` contracts a tensor through the fitted
    left-orthogonal chain, returning coefficients of shape
    (r_{d-1}, n_d); ``inverse_transform`` maps such coefficients back.
    """

    def __init__(self, ranks=None, iterations: int = 100,
                 strategy: Optional[TruncationStrategy] = None,
                 tol: Optional[float] = None):
        self.ranks = ranks
        self.iterations = iterations
        self.strategy = strategy
        self.tol = tol

    def fit(self, X, y=None):
        if self.ranks is None:
            raise ValueError("ranks must be set before fitting")
        X = as_tensor(X, min_ndim=2)
        decomp, trace = nonneg_ttsvd(X, self.ranks, self.iterations,
                                     strategy=self.strategy, tol=self.tol)
        self.decomposition_ = decomp
        self.trace_ = trace
        self.n_iter_ = len(trace)
        self.shape_ = X.shape
        return self

    def transform(self, X) -> np.ndarray:
        _check_fitted(self, "decomposition_")
        X = as_tensor(X, min_ndim=2)
        if X.shape != self.shape_:
            raise ValueError(f"expected shape {self.shape_}, got {X.shape}")
        T = self.decomposition_
        Z = T.first.T @ X.reshape(X.shape[0], -1)
        for G, n in zip(T.cores, X.shape[1:-1]):
            r_in, _, r_out = G.shape
            Z = G.reshape(r_in * n, r_out).T @ Z.reshape(r_in * n, -1)
        return np.ascontiguousarray(Z.reshape(Z.shape[0], X.shape[-1]))

    def inverse_transform(self, C) -> np.ndarray:
        _check_fitted(self, "decomposition_")
        C = as_tensor(C, min_ndim=2)
        T = self.decomposition_
        r_last = T.ranks[-1]
        if C.shape != (r_last, self.shape_[-1]):
            raise ValueError(f"expected coefficients of shape {(r_last, self.shape_[-1])}, got {C.shape}")
        M = T.first
        for G in T.cores:
            r_in, n, r_out = G.shape
            M = (M @ G.reshape(r_in, n * r_out)).reshape(-1, r_out)
        return np.ascontiguousarray((M @ C).reshape(self.shape_))

    def reconstruction(self) -> np.ndarray:
        _check_fitted(self, "decomposition_")
        return tt_reconstruct(self.decomposition_)
