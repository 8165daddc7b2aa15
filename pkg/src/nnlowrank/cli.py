"""Experiment command line: dataset generation, solver runs, benchmarks.

Subcommands
-----------
generate     hilbert | gaussian | import - produce DTEN inputs
approximate  run a Tucker/TT solver (plain or alternating projections)
nlrt         run the NLRT consensus baseline
bench        per-iteration scaling benchmark with log-log slope fits
report       recompute a quality report from a saved decomposition

Every run writes its artifacts under an output directory resolved from,
in order: the ``--outdir`` flag, the ``NNLOWRANK_OUTDIR`` environment
variable, the current directory.

Exit status: 0 success, 2 configuration error, 3 I/O error, 4 numerical
failure.
"""

from __future__ import annotations

import functools
import json
import os
import sys
import time
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Optional, Tuple

import click
import numpy as np

from . import __version__
from .benchmarks import rows_to_csv, run_scaling_benchmark, slopes_to_csv
from .data_io import (GaussianMixtureSpec, TensorIOError, gaussian_mixture_tensor,
                      hilbert_tensor, load_metadata, load_tensor, load_tt,
                      load_tucker, save_tensor, save_tt, save_tucker, _read_manifest)
from .metrics import quality_report
from .nlrt import nlrt_auxiliary, nlrt_init, nlrt_iterate
from .sketching import RankDeficientSketchError, TruncationStrategy
from .tensor_train import nonneg_ttsvd, tt_reconstruct, ttsvd
from .trace import ConvergenceTrace, TraceRow, measure_iterate
from .tucker import nonneg_sthosvd, sthosvd, tucker_reconstruct

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4

_SVD_CHOICES = ("det", "hmt", "tropp")


def classify_error(exc: BaseException) -> int:
    """Map an exception to the CLI's exit status contract."""
    if isinstance(exc, (TensorIOError, OSError)):
        return EXIT_IO
    if isinstance(exc, (RankDeficientSketchError, np.linalg.LinAlgError, FloatingPointError)):
        return EXIT_NUMERICAL
    if isinstance(exc, (ValueError, TypeError, KeyError)):
        return EXIT_CONFIG
    raise exc


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except Exception as exc:  # noqa: BLE001 - single funnel to exit codes
            code = classify_error(exc)
            click.echo(f"error: {exc}", err=True)
            sys.exit(code)
    return wrapper


def _resolve_outdir(outdir: Optional[str]) -> Path:
    if outdir:
        return Path(outdir)
    env = os.environ.get("NNLOWRANK_OUTDIR")
    return Path(env) if env else Path(".")


def _parse_int_tuple(text: str, what: str) -> Tuple[int, ...]:
    try:
        parts = tuple(int(p) for p in str(text).replace(" ", "").split(",") if p != "")
    except ValueError:
        raise ValueError(f"cannot parse {what} from {text!r}; expected comma-separated integers")
    if not parts:
        raise ValueError(f"{what} must not be empty")
    return parts


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one ``approximate`` run; echoed into the report
    JSON so any result can be traced back to its inputs."""

    input: str
    format: str = "tucker"          # "tucker" | "tt"
    ranks: Tuple[int, ...] = ()
    method: str = "ap"              # "plain" | "ap"
    svd: str = "det"                # "det" | "hmt" | "tropp"
    sketch_k: Optional[int] = None
    power: int = 0
    cotail_l: Optional[int] = None
    iterations: int = 1
    seed: int = 0
    tol: Optional[float] = None
    outdir: str = "."
    trace_name: str = "trace.csv"
    report_name: str = "report.json"
    decomposition_dir: str = "decomposition"

    def __post_init__(self):
        if self.format not in ("tucker", "tt"):
            raise ValueError(f"format must be 'tucker' or 'tt', got {self.format!r}")
        if self.method not in ("plain", "ap"):
            raise ValueError(f"method must be 'plain' or 'ap', got {self.method!r}")
        if self.svd not in _SVD_CHOICES:
            raise ValueError(f"svd must be one of {_SVD_CHOICES}, got {self.svd!r}")
        if not self.ranks:
            raise ValueError("ranks must be given")
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.svd == "hmt" and self.sketch_k is None:
            raise ValueError("hmt requires --sketch-k")
        if self.svd == "tropp" and (self.sketch_k is None or self.cotail_l is None):
            raise ValueError("tropp requires --sketch-k and --cotail-l")

    def strategy(self) -> TruncationStrategy:
        if self.svd == "hmt":
            return TruncationStrategy.hmt(p=self.power, k=self.sketch_k, seed=self.seed)
        if self.svd == "tropp":
            return TruncationStrategy.tropp(k=self.sketch_k, l=self.cotail_l, seed=self.seed)
        return TruncationStrategy.deterministic()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ranks"] = list(self.ranks)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f: d[f] for f in cls.__dataclass_fields__ if f in d}
        unknown = set(d) - set(known)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "ranks" in known:
            known["ranks"] = tuple(int(r) for r in known["ranks"])
        return cls(**known)


def load_config_file(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data


def build_config(config_path: Optional[str], **flags) -> ExperimentConfig:
    """Merge a JSON config file with command-line flags; flags win."""
    base = load_config_file(config_path) if config_path else {}
    for key, value in flags.items():
        if value is not None:
            base[key] = value
    if "ranks" in base and isinstance(base["ranks"], str):
        base["ranks"] = _parse_int_tuple(base["ranks"], "ranks")
    if "input" not in base or base["input"] is None:
        raise ValueError("an input tensor is required (flag -i or config key 'input')")
    if "outdir" not in base:
        base["outdir"] = str(_resolve_outdir(None))
    return ExperimentConfig.from_dict(base)


@click.group()
@click.version_option(version=__version__, prog_name="nnlowrank")
def main():
    """Nonnegative low-rank tensor approximation experiments."""


# ---------------------------------------------------------------- generate

@main.group()
def generate():
    """Produce input tensors in the DTEN container."""


@generate.command("hilbert")
@click.option("--shape", required=True, help="Comma-separated extents, e.g. 128,128,128.")
@click.option("-o", "--output", default=None, help="Output DTEN path (default hilbert.dten).")
@click.option("--outdir", default=None, help="Output directory (default $NNLOWRANK_OUTDIR or '.').")
@guarded
def generate_hilbert(shape, output, outdir):
    """Inverse-index-sum tensor whose entries are 1/(i_1+...+i_d-d+1)."""
    extents = _parse_int_tuple(shape, "shape")
    X = hilbert_tensor(extents)
    path = _resolve_outdir(outdir) / (output or "hilbert.dten")
    save_tensor(X, path, metadata={"source": "hilbert", "shape": list(extents)})
    click.echo(f"wrote {path}")


@generate.command("gaussian")
@click.option("--n", default=64, show_default=True, help="Grid points per axis.")
@click.option("-o", "--output", default=None, help="Output DTEN path (default gaussian.dten).")
@click.option("--outdir", default=None)
@guarded
def generate_gaussian(n, output, outdir):
    """The bundled 4-D two-component Gaussian benchmark mixture."""
    spec = GaussianMixtureSpec.benchmark_mixture(n=n)
    X = gaussian_mixture_tensor(spec)
    path = _resolve_outdir(outdir) / (output or "gaussian.dten")
    save_tensor(X, path, metadata={"source": "gaussian-benchmark-mixture", "n": int(n)})
    click.echo(f"wrote {path}")


@generate.command("import")
@click.argument("source")
@click.option("-o", "--output", default=None, help="Output DTEN path (default import.dten).")
@click.option("--outdir", default=None)
@click.option("--rescale/--no-rescale", default=True, show_default=True,
              help="Linearly rescale entries to [0, 1].")
@guarded
def generate_import(source, output, outdir, rescale):
    """Import an external DTEN tensor, optionally rescaled to [0, 1].

    The rescale bounds are recorded in the JSON sidecar so the original
    scale can be recovered.
    """
    X = load_tensor(source)
    meta = {"source": str(source)}
    if rescale:
        lo, hi = float(X.min()), float(X.max())
        if hi == lo:
            raise ValueError("cannot rescale a constant tensor")
        X = (X - lo) / (hi - lo)
        meta["rescale"] = {"min": lo, "max": hi}
    path = _resolve_outdir(outdir) / (output or "import.dten")
    save_tensor(X, path, metadata=meta)
    click.echo(f"wrote {path}")


# ------------------------------------------------------------- approximate

def _write_report(path: Path, config_dict: dict, total_s: float,
                  per_iter_median_s: float, X, Y) -> None:
    q = quality_report(X, Y)
    nf = float(np.linalg.norm(X.ravel()))
    nc = float(np.abs(X).max())
    payload = {
        "version": __version__,
        "config": config_dict,
        "timing": {"total_s": total_s, "per_iteration_median_s": per_iter_median_s},
        "quality": q.to_dict(),
        "negativity_relative": {
            "frobenius": q.negativity.frobenius / nf,
            "chebyshev": q.negativity.chebyshev / nc,
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _per_iter_median(trace: ConvergenceTrace) -> float:
    elapsed = trace.column("elapsed_s")
    return float(np.median(np.diff(np.concatenate([[0.0], elapsed]))))


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Execute one configured run; returns the output directory.

    Writes the trace CSV, the report JSON, and the final decomposition as
    DTEN parts with a manifest. Used by both the CLI and tests.
    """
    X = load_tensor(cfg.input)
    strategy = cfg.strategy()
    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    start = time.perf_counter()
    if cfg.method == "ap":
        if cfg.format == "tucker":
            decomp, trace = nonneg_sthosvd(X, cfg.ranks, cfg.iterations,
                                           strategy=strategy, tol=cfg.tol)
            Y = tucker_reconstruct(decomp)
        else:
            decomp, trace = nonneg_ttsvd(X, cfg.ranks, cfg.iterations,
                                         strategy=strategy, tol=cfg.tol)
            Y = tt_reconstruct(decomp)
    else:
        ref_frob = float(np.linalg.norm(X.ravel()))
        ref_cheb = float(np.abs(X).max())
        if cfg.format == "tucker":
            decomp = sthosvd(X, cfg.ranks, strategy)
            Y = tucker_reconstruct(decomp)
        else:
            decomp = ttsvd(X, cfg.ranks, strategy)
            Y = tt_reconstruct(decomp)
        trace = ConvergenceTrace()
        trace.append(measure_iterate(1, Y, X, ref_frob, ref_cheb,
                                     time.perf_counter() - start))
    total_s = time.perf_counter() - start

    trace.save_csv(outdir / cfg.trace_name)
    if cfg.format == "tucker":
        save_tucker(decomp, outdir / cfg.decomposition_dir)
    else:
        save_tt(decomp, outdir / cfg.decomposition_dir)
    _write_report(outdir / cfg.report_name, cfg.to_dict(), total_s,
                  _per_iter_median(trace), X, Y)
    return outdir


@main.command("approximate")
@click.option("-i", "--input", "input_", default=None, help="Input DTEN tensor.")
@click.option("--format", "format_", type=click.Choice(["tucker", "tt"]), default=None)
@click.option("--ranks", default=None, help="Comma-separated target ranks.")
@click.option("--method", type=click.Choice(["plain", "ap"]), default=None,
              help="Single decomposition or alternating projections.")
@click.option("--svd", type=click.Choice(list(_SVD_CHOICES)), default=None,
              help="Rank-truncation backend.")
@click.option("--sketch-k", type=int, default=None, help="Range sketch size (hmt/tropp).")
@click.option("--power", type=int, default=None, help="Power iterations (hmt).")
@click.option("--cotail-l", type=int, default=None, help="Co-range sketch size (tropp).")
@click.option("--iters", type=int, default=None, help="Iteration count.")
@click.option("--seed", type=int, default=None, help="RNG seed for sketched backends.")
@click.option("--tol", type=float, default=None,
              help="Early stop when normalized negativity falls below this.")
@click.option("--outdir", default=None)
@click.option("--config", "config_path", default=None,
              help="JSON config file; explicit flags override its values.")
@guarded
def approximate(input_, format_, ranks, method, svd, sketch_k, power, cotail_l,
                iters, seed, tol, outdir, config_path):
    """Approximate a tensor at fixed ranks and write trace/report/factors."""
    cfg = build_config(
        config_path,
        input=input_,
        format=format_,
        ranks=ranks,
        method=method,
        svd=svd,
        sketch_k=sketch_k,
        power=power,
        cotail_l=cotail_l,
        iterations=iters,
        seed=seed,
        tol=tol,
        outdir=str(Path(outdir)) if outdir is not None else None,
    )
    out = run_experiment(cfg)
    click.echo(f"artifacts in {out}")


# -------------------------------------------------------------------- nlrt

@main.command("nlrt")
@click.option("-i", "--input", "input_", required=True, help="Input DTEN tensor.")
@click.option("--ranks", required=True, help="Comma-separated mode ranks.")
@click.option("--iters", type=int, default=100, show_default=True)
@click.option("--outdir", default=None)
@guarded
def nlrt_cmd(input_, ranks, iters, outdir):
    """Consensus alternating-projection baseline (deterministic SVD only).

    Writes one trace CSV per component, the auxiliary Tucker decomposition,
    and a report measured on the auxiliary reconstruction. The reported
    timing covers the iterations only, excluding the final auxiliary
    decomposition, so it is comparable with published NLRT figures.
    """
    X = load_tensor(input_)
    rank_tuple = _parse_int_tuple(ranks, "ranks")
    outdir = _resolve_outdir(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    start = time.perf_counter()
    state, traces = nlrt_iterate(nlrt_init(X, rank_tuple), iters, reference=X)
    total_s = time.perf_counter() - start

    for k, trace in enumerate(traces, start=1):
        trace.save_csv(outdir / f"trace_component_{k}.csv")
    aux = nlrt_auxiliary(state)
    save_tucker(aux, outdir / "decomposition")
    Y = tucker_reconstruct(aux)
    config_echo = {"input": str(input_), "method": "nlrt", "ranks": list(rank_tuple),
                   "iterations": int(iters), "outdir": str(outdir)}
    _write_report(outdir / "report.json", config_echo, total_s,
                  _per_iter_median(traces[0]), X, Y)
    click.echo(f"artifacts in {outdir}")


# ------------------------------------------------------------------- bench

@main.command("bench")
@click.option("--sizes", default="32,48,64,96", show_default=True,
              help="Comma-separated cube sizes.")
@click.option("--dims", type=int, default=3, show_default=True, help="Cube order d.")
@click.option("--method", "methods", type=click.Choice(["tucker", "tt"]),
              multiple=True, default=("tucker",), show_default=True)
@click.option("--svd", "svds", type=click.Choice(list(_SVD_CHOICES)),
              multiple=True, default=("det",), show_default=True)
@click.option("--ranks", default=None, help="Ranks (defaults: 3,2,4 tucker / 3,2 tt).")
@click.option("--sketch-k", type=int, default=15, show_default=True)
@click.option("--power", type=int, default=0, show_default=True)
@click.option("--cotail-l", type=int, default=30, show_default=True)
@click.option("--iters", type=int, default=3, show_default=True,
              help="Timed iterations per configuration (after 1 warm-up).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--outdir", default=None)
@guarded
def bench(sizes, dims, methods, svds, ranks, sketch_k, power, cotail_l, iters, seed, outdir):
    """Per-iteration scaling benchmark; writes bench.csv and slopes.csv."""
    size_tuple = _parse_int_tuple(sizes, "sizes")
    strategies = []
    for name in svds:
        if name == "det":
            strategies.append(TruncationStrategy.deterministic())
        elif name == "hmt":
            strategies.append(TruncationStrategy.hmt(p=power, k=sketch_k, seed=seed))
        else:
            strategies.append(TruncationStrategy.tropp(k=sketch_k, l=cotail_l, seed=seed))
    kwargs = {}
    if ranks is not None:
        rank_tuple = _parse_int_tuple(ranks, "ranks")
        kwargs["tucker_ranks" if "tucker" in methods else "tt_ranks"] = rank_tuple
        if "tucker" in methods and "tt" in methods:
            raise ValueError("--ranks with both methods is ambiguous; run them separately")
    rows, slopes = run_scaling_benchmark(size_tuple, d=dims, methods=tuple(methods),
                                         strategies=tuple(strategies), iters=iters,
                                         **kwargs)
    outdir = _resolve_outdir(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "bench.csv").write_text(rows_to_csv(rows), encoding="ascii")
    (outdir / "slopes.csv").write_text(slopes_to_csv(slopes), encoding="ascii")
    for key, slope in sorted(slopes.items()):
        click.echo(f"{key[0]} {key[1]}: slope {slope:.2f}")
    click.echo(f"artifacts in {outdir}")


# ------------------------------------------------------------------ report

@main.command("report")
@click.option("-i", "--input", "input_", required=True, help="Reference DTEN tensor.")
@click.option("-d", "--decomposition", "decomp_dir", required=True,
              help="Directory holding manifest.json and DTEN parts.")
@click.option("-o", "--output", default=None, help="Report JSON path (default report.json).")
@click.option("--outdir", default=None)
@guarded
def report_cmd(input_, decomp_dir, output, outdir):
    """Quality report of a saved decomposition against a reference tensor."""
    X = load_tensor(input_)
    manifest = _read_manifest(decomp_dir)
    if manifest.get("format") == "tucker":
        Y = tucker_reconstruct(load_tucker(decomp_dir))
    elif manifest.get("format") == "tt":
        Y = tt_reconstruct(load_tt(decomp_dir))
    else:
        raise TensorIOError(f"{decomp_dir}: unknown decomposition format in manifest")
    path = _resolve_outdir(outdir) / (output or "report.json")
    q = quality_report(X, Y)
    nf = float(np.linalg.norm(X.ravel()))
    nc = float(np.abs(X).max())
    payload = {
        "version": __version__,
        "reference": str(input_),
        "decomposition": str(decomp_dir),
        "quality": q.to_dict(),
        "negativity_relative": {
            "frobenius": q.negativity.frobenius / nf,
            "chebyshev": q.negativity.chebyshev / nc,
        },
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
