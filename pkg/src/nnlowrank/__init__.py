"""Nonnegative low-rank tensor approximation in Tucker and tensor-train
formats via alternating projections, with deterministic and sketched rank
truncation."""

__version__ = "0.1.0"

from .tensor_ops import (NegativityStats, chebyshev_norm, fold, frobenius_inner,
                         frobenius_norm, matricize, mode_k_product,
                         negativity_stats, nonneg_project, unfold)
from .sketching import (RankDeficientSketchError, SeedStream, TruncatedSVD,
                        TruncationStrategy, derive_rng, hmt_svd, rademacher_matrix,
                        randomized_range, tropp_svd, truncate_rank, truncated_svd)
from .trace import TRACE_COLUMNS, ConvergenceTrace, TraceRow, measure_iterate
from .tucker import (TuckerDecomposition, nonneg_sthosvd, sthosvd, tucker_element,
                     tucker_reconstruct)
from .tensor_train import (TTDecomposition, nonneg_ttsvd, tt_element,
                           tt_reconstruct, ttsvd)
from .nlrt import NlrtState, nlrt_auxiliary, nlrt_init, nlrt_iterate
from .data_io import (DimensionOverflowError, GaussianMixtureSpec,
                      InvalidHeaderError, TensorIOError, TruncatedPayloadError,
                      gaussian_mixture_tensor, hilbert_tensor, load_metadata,
                      load_tensor, load_tt, load_tucker, save_tensor, save_tt,
                      save_tucker)
from .metrics import QualityReport, quality_report, r_squared, relative_errors, ssim_image, ssim_bandwise_mean
from .estimators import NonnegativeTensorTrain, NonnegativeTucker

__all__ = [
    "__version__",
    "NegativityStats", "chebyshev_norm", "fold", "frobenius_inner",
    "frobenius_norm", "matricize", "mode_k_product", "negativity_stats",
    "nonneg_project", "unfold",
    "RankDeficientSketchError", "SeedStream", "TruncatedSVD",
    "TruncationStrategy", "derive_rng", "hmt_svd", "rademacher_matrix",
    "randomized_range", "tropp_svd", "truncate_rank", "truncated_svd",
    "TRACE_COLUMNS", "ConvergenceTrace", "TraceRow", "measure_iterate",
    "TuckerDecomposition", "nonneg_sthosvd", "sthosvd", "tucker_element",
    "tucker_reconstruct",
    "TTDecomposition", "nonneg_ttsvd", "tt_element", "tt_reconstruct", "ttsvd",
    "NlrtState", "nlrt_auxiliary", "nlrt_init", "nlrt_iterate",
    "DimensionOverflowError", "GaussianMixtureSpec", "InvalidHeaderError",
    "TensorIOError", "TruncatedPayloadError", "gaussian_mixture_tensor",
    "hilbert_tensor", "load_metadata", "load_tensor", "load_tt", "load_tucker",
    "save_tensor", "save_tt", "save_tucker",
    "QualityReport", "quality_report", "r_squared", "relative_errors",
    "ssim_image", "ssim_bandwise_mean",
    "NonnegativeTensorTrain", "NonnegativeTucker",
]
