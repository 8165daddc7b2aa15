"""Dataset generators and on-disk tensor storage.

Generators
----------
``hilbert_tensor`` builds the multidimensional Hilbert tensor
X(i_1, ..., i_d) = 1 / (i_1 + ... + i_d - d + 1) with 1-based indices; its
unfoldings have exponentially decaying singular values, which is what makes
tiny multilinear ranks usable. ``gaussian_mixture_tensor`` samples a sum of
Gaussian kernels alpha_j * exp(-(x - mu_j)^T A_j^{-1} (x - mu_j) / 2) on an
equidistant tensor-product grid over [-a, a]^d.

Binary container (DTEN)
-----------------------
A deliberately minimal format, parseable from any language:

====================  ==========================================
bytes 0-3             magic ``b"DTEN"``
bytes 4-7             format version, uint32 little-endian (currently 1)
bytes 8-11            number of dimensions d, uint32 little-endian
next 8*d bytes        extents, uint64 little-endian each
rest                  payload: float64 little-endian, row-major
====================  ==========================================

An optional JSON sidecar at ``<path>.json`` records free-form provenance
(source name, rescale bounds); it is never load-bearing.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from ._validation import as_tensor, check_positive_int
from .tucker import TuckerDecomposition
from .tensor_train import TTDecomposition

__all__ = [
    "TensorIOError",
    "InvalidHeaderError",
    "DimensionOverflowError",
    "TruncatedPayloadError",
    "GaussianMixtureSpec",
    "hilbert_tensor",
    "gaussian_mixture_tensor",
    "save_tensor",
    "load_tensor",
    "load_metadata",
    "save_tucker",
    "load_tucker",
    "save_tt",
    "load_tt",
]

MAGIC = b"DTEN"
FORMAT_VERSION = 1
_MAX_NDIM = 64
_MAX_ELEMENTS = 1 << 55  # caps payload size at a petabyte-scale sanity bound


class TensorIOError(Exception):
    """Base class for tensor container errors."""


class InvalidHeaderError(TensorIOError):
    """Magic bytes or format version not recognized."""


class DimensionOverflowError(TensorIOError):
    """Declared dimension count or extents exceed supported bounds."""


class TruncatedPayloadError(TensorIOError):
    """Payload size does not match the extents promised by the header."""


def hilbert_tensor(shape) -> np.ndarray:
    """Multidimensional Hilbert tensor with entries strictly in (0, 1].

    The entry at the all-ones (1-based) multi-index equals 1, and the value
    decays as the inverse index sum.
    """
    shape = tuple(check_positive_int(n, "extent") for n in shape)
    if not shape:
        raise ValueError("shape must have at least one extent")
    grids = np.ix_(*(np.arange(n, dtype=np.float64) for n in shape))
    denom = np.zeros(shape)
    for g in grids:
        denom = denom + g
    return 1.0 / (denom + 1.0)


@dataclass(frozen=True)
class GaussianMixtureSpec:
    """Mixture of Gaussian kernels sampled on [-a, a]^d.

    ``components`` holds (weight, mean, covariance) triples; every
    covariance must be symmetric positive definite (smallest eigenvalue at
    least 1e-10) and every weight strictly positive, so the sampled field is
    strictly positive.
    """

    d: int
    n: int
    a: float
    components: Tuple[Tuple[float, np.ndarray, np.ndarray], ...]

    def __post_init__(self):
        check_positive_int(self.d, "d")
        if self.n < 2:
            raise ValueError("need at least 2 grid points per axis")
        if not self.a > 0:
            raise ValueError("half-width a must be positive")
        if not self.components:
            raise ValueError("mixture needs at least one component")
        normalized = []
        for j, (alpha, mu, cov) in enumerate(self.components):
            alpha = float(alpha)
            if not alpha > 0:
                raise ValueError(f"component {j} weight must be positive")
            mu = np.asarray(mu, dtype=np.float64)
            cov = np.asarray(cov, dtype=np.float64)
            if mu.shape != (self.d,):
                raise ValueError(f"component {j} mean must have length {self.d}")
            if cov.shape != (self.d, self.d):
                raise ValueError(f"component {j} covariance must be {self.d}x{self.d}")
            if not np.allclose(cov, cov.T, atol=1e-12):
                raise ValueError(f"component {j} covariance is not symmetric")
            if np.linalg.eigvalsh(cov).min() < 1e-10:
                raise ValueError(f"component {j} covariance is singular or indefinite")
            normalized.append((alpha, mu, cov))
        object.__setattr__(self, "components", tuple(normalized))

    @classmethod
    def benchmark_mixture(cls, n: int = 64) -> "GaussianMixtureSpec":
        """The library's bundled 4-D two-component benchmark mixture.

        Unit weights, one component centered at the origin and one at
        (0.5, -0.5, 0.5, -0.5), with fixed dense SPD covariances, sampled on
        [-1, 1]^4. Used by the experiment suite and the CLI's ``gaussian``
        generator.
        """
        cov1 = np.array([
            [0.403, 0.236, 0.159, 0.188],
            [0.236, 0.422, 0.193, 0.313],
            [0.159, 0.193, 0.124, 0.164],
            [0.188, 0.313, 0.164, 0.288],
        ])
        cov2 = np.array([
            [0.173, 0.229, 0.200, 0.191],
            [0.229, 0.347, 0.254, 0.201],
            [0.200, 0.254, 0.348, 0.252],
            [0.191, 0.201, 0.252, 0.360],
        ])
        mu1 = np.zeros(4)
        mu2 = np.array([0.5, -0.5, 0.5, -0.5])
        return cls(d=4, n=int(n), a=1.0,
                   components=((1.0, mu1, cov1), (1.0, mu2, cov2)))


def gaussian_mixture_tensor(spec: GaussianMixtureSpec) -> np.ndarray:
    """Sample the mixture on the equidistant grid x_m = -a + (i_m - 1) * 2a/(n-1).

    The quadratic form is accumulated by broadcasting the pairwise terms
    B[m, m'] * (x_m - mu_m) * (x_m' - mu_m'), B = A^{-1}, so the full point
    cloud is never materialized.
    """
    d, n, a = spec.d, spec.n, spec.a
    step = 2.0 * a / (n - 1)
    axis = -a + step * np.arange(n, dtype=np.float64)
    shape = (n,) * d
    out = np.zeros(shape)
    for alpha, mu, cov in spec.components:
        B = np.linalg.inv(cov)
        centered = [axis - mu[m] for m in range(d)]
        q = np.zeros(shape)
        for m in range(d):
            u_m = centered[m].reshape((1,) * m + (n,) + (1,) * (d - m - 1))
            for mp in range(d):
                u_mp = centered[mp].reshape((1,) * mp + (n,) + (1,) * (d - mp - 1))
                q += B[m, mp] * u_m * u_mp
        out += alpha * np.exp(-0.5 * q)
    return out


def _sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def save_tensor(X, path, metadata: Optional[dict] = None) -> None:
    """Write a tensor in the DTEN container; bit-exact roundtrip guaranteed.

    ``metadata``, when given, is written as a JSON sidecar next to the file.
    """
    X = as_tensor(X)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", FORMAT_VERSION, X.ndim))
        fh.write(struct.pack("<%dQ" % X.ndim, *X.shape))
        fh.write(np.ascontiguousarray(X, dtype="<f8").tobytes())
    if metadata is not None:
        with open(_sidecar_path(path), "w", encoding="utf-8") as fh:
            json.dump(metadata, fh, indent=2, sort_keys=True)
            fh.write("\n")


def load_tensor(path) -> np.ndarray:
    """Read a DTEN file back into a row-major float64 array."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 12 or blob[:4] != MAGIC:
        raise InvalidHeaderError(f"{path}: not a DTEN file (bad magic)")
    version, ndim = struct.unpack_from("<II", blob, 4)
    if version != FORMAT_VERSION:
        raise InvalidHeaderError(f"{path}: unsupported format version {version}")
    if ndim == 0 or ndim > _MAX_NDIM:
        raise DimensionOverflowError(f"{path}: dimension count {ndim} out of range 1..{_MAX_NDIM}")
    header_end = 12 + 8 * ndim
    if len(blob) < header_end:
        raise TruncatedPayloadError(f"{path}: header cut short")
    extents = struct.unpack_from("<%dQ" % ndim, blob, 12)
    total = 1
    for e in extents:
        if e == 0:
            raise DimensionOverflowError(f"{path}: zero extent in header")
        total *= e
        if total > _MAX_ELEMENTS:
            raise DimensionOverflowError(f"{path}: extents {extents} overflow the supported size")
    expected = header_end + 8 * total
    if len(blob) != expected:
        raise TruncatedPayloadError(
            f"{path}: payload has {len(blob) - header_end} bytes, header promises {8 * total}"
        )
    data = np.frombuffer(blob, dtype="<f8", count=total, offset=header_end)
    return np.ascontiguousarray(data.astype(np.float64).reshape(extents))


def load_metadata(path) -> Optional[dict]:
    """Read the JSON sidecar written by :func:`save_tensor`, if present."""
    sidecar = _sidecar_path(path)
    if not sidecar.exists():
        return None
    with open(sidecar, "r", encoding="utf-8") as fh:
        return json.load(fh)


# Decomposition directories: one manifest plus one DTEN file per part, so a
# decomposition saved here can be reassembled by any DTEN reader.

def save_tucker(T: TuckerDecomposition, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_tensor(T.core, directory / "core.dten")
    names = []
    for k, U in enumerate(T.factors, start=1):
        name = f"factor_{k}.dten"
        save_tensor(U, directory / name)
        names.append(name)
    manifest = {
        "format": "tucker",
        "shape": [int(n) for n in T.shape],
        "ranks": [int(r) for r in T.ranks],
        "core": "core.dten",
        "factors": names,
    }
    with open(directory / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return directory / "manifest.json"


def save_tt(T: TTDecomposition, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_tensor(T.first, directory / "first.dten")
    names = []
    for k, G in enumerate(T.cores, start=2):
        name = f"core_{k}.dten"
        save_tensor(G, directory / name)
        names.append(name)
    save_tensor(T.last, directory / "last.dten")
    manifest = {
        "format": "tt",
        "shape": [int(n) for n in T.shape],
        "ranks": [int(r) for r in T.ranks],
        "first": "first.dten",
        "cores": names,
        "last": "last.dten",
    }
    with open(directory / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return directory / "manifest.json"


def _read_manifest(directory) -> dict:
    directory = Path(directory)
    try:
        with open(directory / "manifest.json", "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise TensorIOError(f"{directory}: no manifest.json") from None
    except json.JSONDecodeError as e:
        raise TensorIOError(f"{directory}: malformed manifest: {e}") from None


def load_tucker(directory) -> TuckerDecomposition:
    directory = Path(directory)
    manifest = _read_manifest(directory)
    if manifest.get("format") != "tucker":
        raise TensorIOError(f"{directory}: manifest format is not 'tucker'")
    core = load_tensor(directory / manifest["core"])
    factors = [load_tensor(directory / name) for name in manifest["factors"]]
    return TuckerDecomposition(core=core, factors=factors)


def load_tt(directory) -> TTDecomposition:
    directory = Path(directory)
    manifest = _read_manifest(directory)
    if manifest.get("format") != "tt":
        raise TensorIOError(f"{directory}: manifest format is not 'tt'")
    first = load_tensor(directory / manifest["first"])
    cores = [load_tensor(directory / name) for name in manifest["cores"]]
    last = load_tensor(directory / manifest["last"])
    return TTDecomposition(first=first, cores=cores, last=last)
