"""Per-iteration convergence records for the alternating-projection solvers.

A trace row reports, for the reconstructed low-rank iterate of one
iteration:

* ``neg_frobenius``  - Frobenius norm of the negative part divided by the
  Frobenius norm of the tensor being approximated;
* ``neg_chebyshev``  - Chebyshev norm of the negative part divided by the
  Chebyshev norm of that tensor;
* ``neg_fraction``   - share of strictly negative entries, in [0, 1];
* ``rel_err_frobenius`` / ``rel_err_chebyshev`` - relative errors
  ||X - Y|| / ||X|| in the two norms;
* ``elapsed_s``      - cumulative wall-clock seconds since the solver started.

Negativity columns are normalized so they can be read on the same scale as
the relative errors. The absolute norms are recovered by multiplying with
the reference tensor's norms. All columns except ``elapsed_s`` are
deterministic for a fixed seed; wall-clock time never is.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, fields
from typing import List

import numpy as np

__all__ = ["TRACE_COLUMNS", "TraceRow", "ConvergenceTrace", "measure_iterate"]

TRACE_COLUMNS = (
    "iteration",
    "neg_frobenius",
    "neg_chebyshev",
    "neg_fraction",
    "rel_err_frobenius",
    "rel_err_chebyshev",
    "elapsed_s",
)


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    neg_frobenius: float
    neg_chebyshev: float
    neg_fraction: float
    rel_err_frobenius: float
    rel_err_chebyshev: float
    elapsed_s: float


class ConvergenceTrace:
    """Ordered collection of :class:`TraceRow` with CSV serialization.

    Iteration indices are strictly increasing from 1 and all statistics are
    finite and nonnegative; both are enforced on append.
    """

    def __init__(self, rows: List[TraceRow] | None = None):
        self._rows: List[TraceRow] = []
        for row in rows or []:
            self.append(row)

    def append(self, row: TraceRow) -> None:
        expected = self._rows[-1].iteration + 1 if self._rows else 1
        if row.iteration != expected:
            raise ValueError(f"iteration indices must increase from 1; expected {expected}, got {row.iteration}")
        stats = (row.neg_frobenius, row.neg_chebyshev, row.neg_fraction,
                 row.rel_err_frobenius, row.rel_err_chebyshev, row.elapsed_s)
        if not all(np.isfinite(stats)):
            raise ValueError("trace statistics must be finite")
        if any(s < 0 for s in stats):
            raise ValueError("trace statistics must be nonnegative")
        self._rows.append(row)

    def __len__(self) -> int:
        return len(self._rows)

    def __iter__(self):
        return iter(self._rows)

    def __getitem__(self, i) -> TraceRow:
        return self._rows[i]

    @property
    def final(self) -> TraceRow:
        if not self._rows:
            raise IndexError("trace is empty")
        return self._rows[-1]

    def column(self, name: str) -> np.ndarray:
        if name not in TRACE_COLUMNS:
            raise KeyError(name)
        dtype = np.int64 if name == "iteration" else np.float64
        return np.array([getattr(r, name) for r in self._rows], dtype=dtype)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(TRACE_COLUMNS) + "\n")
        for r in self._rows:
            buf.write("%d,%r,%r,%r,%r,%r,%r\n" % (
                r.iteration, r.neg_frobenius, r.neg_chebyshev, r.neg_fraction,
                r.rel_err_frobenius, r.rel_err_chebyshev, r.elapsed_s))
        return buf.getvalue()

    def save_csv(self, path) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "ConvergenceTrace":
        lines = [ln for ln in text.strip().splitlines() if ln]
        if not lines or lines[0].split(",") != list(TRACE_COLUMNS):
            raise ValueError("malformed trace CSV header")
        trace = cls()
        for ln in lines[1:]:
            parts = ln.split(",")
            if len(parts) != len(TRACE_COLUMNS):
                raise ValueError("malformed trace CSV row")
            trace.append(TraceRow(
                iteration=int(parts[0]),
                **{f.name: float(v) for f, v in zip(fields(TraceRow)[1:], parts[1:])},
            ))
        return trace

    @classmethod
    def load_csv(cls, path) -> "ConvergenceTrace":
        with open(path, "r", encoding="ascii") as fh:
            return cls.from_csv(fh.read())


def measure_iterate(iteration: int, iterate: np.ndarray, reference: np.ndarray,
                    ref_frob: float, ref_cheb: float, elapsed_s: float) -> TraceRow:
    """Build one trace row for a low-rank iterate against the reference tensor.

    ``ref_frob`` and ``ref_cheb`` are the reference's norms, precomputed once
    per solve; negativity columns are normalized by them as documented in the
    module docstring.
    """
    neg = np.minimum(iterate, 0.0)
    diff = reference - iterate
    return TraceRow(
        iteration=iteration,
        neg_frobenius=float(np.linalg.norm(neg.ravel())) / ref_frob,
        neg_chebyshev=float(-neg.min()) / ref_cheb + 0.0,
        neg_fraction=float(np.count_nonzero(iterate < 0.0)) / iterate.size,
        rel_err_frobenius=float(np.linalg.norm(diff.ravel())) / ref_frob,
        rel_err_chebyshev=float(np.abs(diff).max()) / ref_cheb,
        elapsed_s=float(elapsed_s),
    )
