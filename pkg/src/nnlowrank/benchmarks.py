"""Empirical per-iteration scaling of the alternating-projection solvers.

One benchmark row = (method, strategy, n): the median per-iteration wall
time of the solver on an n^d cube, warm-up iterations excluded. Per-size
times are paired with a fitted log-log slope per (method, strategy), the
quantity the asymptotic cost claims are checked against: one deterministic
Tucker iteration on an n^d cube costs O(n^{d+1}) (slope d+1), a sketched
one O(n^d (pk + r)) (slope d).

Wall-clock constants are machine-dependent; only ratios and slopes are
meaningful across hosts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .data_io import hilbert_tensor
from .sketching import SeedStream, TruncationStrategy
from .tensor_ops import nonneg_project
from .tensor_train import tt_reconstruct, ttsvd
from .tucker import sthosvd, tucker_reconstruct

__all__ = ["BenchRow", "per_iteration_times", "fit_loglog_slope",
           "run_scaling_benchmark", "rows_to_csv", "slopes_to_csv"]


@dataclass(frozen=True)
class BenchRow:
    method: str          # "tucker" | "tt"
    strategy: str        # human-readable strategy tag
    n: int
    seconds_per_iteration: float


def per_iteration_times(X, ranks, method: str, strategy: TruncationStrategy,
                        iters: int = 3, warmup: int = 1) -> np.ndarray:
    """Individual per-iteration wall times, warm-up iterations dropped.

    Times the bare alternating-projection iteration (orthant projection,
    decomposition, reconstruction) with the same seed-stream labels the
    solvers use, but without trace statistics: those cost extra O(n^d)
    passes per iteration and would bias small-n slope fits.
    """
    if method == "tucker":
        decompose, rebuild, label = sthosvd, tucker_reconstruct, "nonneg_sthosvd"
    elif method == "tt":
        decompose, rebuild, label = ttsvd, tt_reconstruct, "nonneg_ttsvd"
    else:
        raise ValueError(f"method must be 'tucker' or 'tt', got {method!r}")
    stream = SeedStream(strategy.seed, label) if strategy.is_randomized else None
    times = []
    Y = X
    for _ in range(warmup + iters):
        t0 = time.perf_counter()
        Y = rebuild(decompose(nonneg_project(Y), ranks, strategy, seed_stream=stream))
        times.append(time.perf_counter() - t0)
    return np.asarray(times[warmup:], dtype=np.float64)


def fit_loglog_slope(ns: Sequence[int], times: Sequence[float]) -> float:
    """Least-squares slope of log(time) against log(n)."""
    ns = np.asarray(ns, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    if len(ns) < 2:
        raise ValueError("need at least two sizes to fit a slope")
    if (ns <= 0).any() or (times <= 0).any():
        raise ValueError("sizes and times must be positive for a log-log fit")
    return float(np.polyfit(np.log(ns), np.log(times), 1)[0])


def run_scaling_benchmark(
    sizes: Sequence[int],
    d: int = 3,
    tucker_ranks: Tuple[int, ...] = (3, 2, 4),
    tt_ranks: Tuple[int, ...] = (3, 2),
    methods: Sequence[str] = ("tucker",),
    strategies: Sequence[TruncationStrategy] = (TruncationStrategy.deterministic(),),
    iters: int = 3,
    warmup: int = 1,
) -> Tuple[List[BenchRow], Dict[Tuple[str, str], float]]:
    """Benchmark solvers over Hilbert cubes of the given sizes.

    Returns the timing rows (sorted by method, strategy, n so merges are
    deterministic) and a dict of fitted log-log slopes keyed by
    (method, strategy tag).
    """
    sizes = sorted(int(n) for n in sizes)
    if any(n < 2 for n in sizes):
        raise ValueError("sizes must be >= 2")
    rows: List[BenchRow] = []
    for n in sizes:
        X = hilbert_tensor((n,) * d)
        for method in methods:
            ranks = tucker_ranks if method == "tucker" else tt_ranks
            for strat in strategies:
                times = per_iteration_times(X, ranks, method, strat,
                                            iters=iters, warmup=warmup)
                rows.append(BenchRow(method=method, strategy=strat.tag(),
                                     n=n, seconds_per_iteration=float(np.median(times))))
    rows.sort(key=lambda r: (r.method, r.strategy, r.n))
    slopes: Dict[Tuple[str, str], float] = {}
    for method in methods:
        for strat in strategies:
            tag = strat.tag()
            sub = [r for r in rows if r.method == method and r.strategy == tag]
            slopes[(method, tag)] = fit_loglog_slope(
                [r.n for r in sub], [r.seconds_per_iteration for r in sub])
    return rows, slopes


def rows_to_csv(rows: List[BenchRow]) -> str:
    out = ["method,strategy,n,seconds_per_iteration"]
    for r in rows:
        out.append("%s,%s,%d,%r" % (r.method, r.strategy, r.n, r.seconds_per_iteration))
    return "\n".join(out) + "\n"


def slopes_to_csv(slopes: Dict[Tuple[str, str], float]) -> str:
    out = ["method,strategy,loglog_slope"]
    for (method, tag), slope in sorted(slopes.items()):
        out.append("%s,%s,%r" % (method, tag, slope))
    return "\n".join(out) + "\n"
