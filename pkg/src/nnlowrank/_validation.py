"""Input validation helpers shared across the library.

These mirror the conventions of scikit-learn's ``check_array`` but accept
dense tensors of arbitrary order. All public entry points funnel their
array arguments through :func:`as_tensor` so that downstream code can rely
on contiguous float64 storage and finite entries.
"""

from __future__ import annotations

import numbers

import numpy as np

__all__ = [
    "as_tensor",
    "as_matrix",
    "check_mode",
    "check_split",
    "check_ranks",
    "check_index",
    "check_positive_int",
]


def as_tensor(X, name: str = "X", min_ndim: int = 1, check_finite: bool = True) -> np.ndarray:
    """Coerce input to a C-contiguous float64 ndarray and validate it.

    Parameters
    ----------
    X : array_like
        Input data of any order >= ``min_ndim``.
    name : str
        Argument name used in error messages.
    min_ndim : int
        Minimum number of axes required.
    check_finite : bool
        Whether to reject NaN/Inf entries. Internal per-iteration call
        sites pass False because the scan costs a full pass over the data;
        entries are always checked once at the public entry point.

    Returns
    -------
    numpy.ndarray
        Contiguous float64 array. A copy is made only when needed.
    """
    A = np.asarray(X, dtype=np.float64)
    if A.ndim < min_ndim:
        raise ValueError(f"{name} must have at least {min_ndim} axis(es), got {A.ndim}")
    if A.size == 0:
        raise ValueError(f"{name} must not be empty")
    if check_finite and not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return np.ascontiguousarray(A)


def as_matrix(A, name: str = "A", check_finite: bool = True) -> np.ndarray:
    M = as_tensor(A, name=name, min_ndim=2, check_finite=check_finite)
    if M.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got {M.ndim} axes")
    return M


def check_mode(k, ndim: int) -> int:
    """Validate a 1-based mode index ``k`` against a tensor order."""
    if not isinstance(k, numbers.Integral):
        raise TypeError(f"mode index must be an integer, got {type(k).__name__}")
    k = int(k)
    if not 1 <= k <= ndim:
        raise ValueError(f"mode index {k} out of range 1..{ndim}")
    return k


def check_split(k, ndim: int) -> int:
    """Validate a 1-based matricization split index, 1 <= k <= d-1."""
    if not isinstance(k, numbers.Integral):
        raise TypeError(f"split index must be an integer, got {type(k).__name__}")
    k = int(k)
    if not 1 <= k <= ndim - 1:
        raise ValueError(f"split index {k} out of range 1..{ndim - 1}")
    return k


def check_ranks(ranks, expected_len: int, what: str = "ranks") -> tuple:
    try:
        tup = tuple(int(r) for r in ranks)
    except TypeError:
        raise TypeError(f"{what} must be a sequence of integers") from None
    if len(tup) != expected_len:
        raise ValueError(f"{what} must have length {expected_len}, got {len(tup)}")
    if any(r < 1 for r in tup):
        raise ValueError(f"every entry of {what} must be >= 1, got {tup}")
    return tup


def check_index(index, shape) -> tuple:
    """Validate a 1-based multi-index against ``shape``.

    Element indices follow the mathematical convention of the formulas in
    the docstrings: the first entry along each axis has index 1.
    """
    try:
        tup = tuple(int(i) for i in index)
    except TypeError:
        raise TypeError("index must be a sequence of integers") from None
    if len(tup) != len(shape):
        raise ValueError(f"index length {len(tup)} does not match order {len(shape)}")
    for i, n in zip(tup, shape):
        if not 1 <= i <= n:
            raise IndexError(f"index {tup} out of bounds for shape {tuple(shape)} (1-based)")
    return tup


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value
