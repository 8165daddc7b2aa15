"""NLRT: consensus alternating projections with per-mode rank truncation.

The nonnegative low-rank tensor (NLRT) baseline keeps one working copy of
the tensor per mode and alternates exact projections onto two sets:

* Omega_1 - all components equal and nonnegative. The nearest point
  minimizes sum_k ||X_k - Y||_F^2 over Y >= 0, so Y = max(mean_k X_k, 0);
  every component is then replaced by Y (the consensus step).
* Omega_2 - component k has mode-k unfolding of rank <= r_k. Each component
  is truncated independently with the deterministic SVD.

After iterating, a single Tucker summary is extracted by running STHOSVD on
the nonnegative-projected component average.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ._validation import as_tensor, check_positive_int, check_ranks
from .tensor_ops import fold, nonneg_project, unfold
from .sketching import truncated_svd
from .trace import ConvergenceTrace, measure_iterate
from .tucker import TuckerDecomposition, sthosvd

__all__ = ["NlrtState", "nlrt_init", "nlrt_iterate", "nlrt_auxiliary"]


@dataclass
class NlrtState:
    """One working component per mode, all of the input's shape, plus the
    target mode ranks."""

    components: List[np.ndarray]
    ranks: Tuple[int, ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("state needs at least one component")
        shape = self.components[0].shape
        if any(C.shape != shape for C in self.components):
            raise ValueError("all components must share one shape")
        if len(self.components) != len(shape):
            raise ValueError("need exactly one component per mode")
        self.ranks = check_ranks(self.ranks, len(shape))


def nlrt_init(X, ranks) -> NlrtState:
    """Start from d identical copies of the input tensor."""
    X = as_tensor(X)
    ranks = check_ranks(ranks, X.ndim)
    return NlrtState(components=[X.copy() for _ in range(X.ndim)], ranks=ranks)


def nlrt_iterate(
    state: NlrtState,
    iters: int,
    reference: Optional[np.ndarray] = None,
) -> Tuple[NlrtState, List[ConvergenceTrace]]:
    """Run ``iters`` consensus/truncation sweeps and trace each component.

    Parameters
    ----------
    state : NlrtState
        Current components; not mutated.
    iters : int
        Number of full Omega_1 -> Omega_2 sweeps.
    reference : array_like, optional
        Tensor against which trace errors are measured. Defaults to the
        first component, which equals the original input when the state
        comes fresh from :func:`nlrt_init`.

    Returns
    -------
    (NlrtState, list of ConvergenceTrace)
        New state and one trace per component, aligned with ``state.components``.
    """
    iters = check_positive_int(iters, "iters")
    if reference is None:
        reference = state.components[0]
    reference = as_tensor(reference)
    shape = state.components[0].shape
    if reference.shape != shape:
        raise ValueError("reference shape does not match the components")

    ref_frob = float(np.linalg.norm(reference.ravel()))
    ref_cheb = float(np.abs(reference).max())
    if ref_frob == 0.0:
        raise ValueError("reference tensor must be nonzero")

    d = len(state.components)
    components = [C.copy() for C in state.components]
    traces = [ConvergenceTrace() for _ in range(d)]
    start = time.perf_counter()
    for i in range(1, iters + 1):
        consensus = nonneg_project(sum(components) / d, check_finite=False)
        for k in range(1, d + 1):
            t = truncated_svd(unfold(consensus, k, check_finite=False),
                              state.ranks[k - 1], check_finite=False)
            components[k - 1] = fold(t.matrix(), k, shape, check_finite=False)
        elapsed = time.perf_counter() - start
        for k in range(d):
            traces[k].append(measure_iterate(i, components[k], reference,
                                             ref_frob, ref_cheb, elapsed))
    return NlrtState(components=components, ranks=state.ranks), traces


def nlrt_auxiliary(state: NlrtState) -> TuckerDecomposition:
    """Tucker summary of the state: deterministic STHOSVD, at the target
    ranks, of the nonnegative-projected component average."""
    avg = nonneg_project(sum(state.components) / len(state.components))
    return sthosvd(avg, state.ranks)
