"""Image denoising (non-local means, db2 wavelet shrinkage), full-reference
quality metrics, and a deterministic benchmark harness."""

from .raster import Image, load_image, save_image, to_gray
from .noise import NoiseSpec, add_gaussian_noise, estimate_sigma, estimate_sigma_averaged
from .spatial import (
    GaussParams,
    NlmParams,
    gaussian_smooth,
    nlm_denoise,
    nlm_denoise_reference,
)
from .wavelet import (
    WaveletFilterBank,
    WaveletParams,
    WaveletPyramid,
    daubechies2,
    dwt2,
    dwt2_reference,
    idwt2,
    select_threshold,
    soft_threshold,
    wavelet_denoise,
)
from .iqa import MetricParams, MetricReport, cw_ssim, evaluate_metrics, psnr, ssim, summer_like
from .bench import BenchConfig, BenchResult, emit_tables, parse_config, run_bench

__version__ = "0.1.0"

__all__ = [
    "Image",
    "load_image",
    "save_image",
    "to_gray",
    "NoiseSpec",
    "add_gaussian_noise",
    "estimate_sigma",
    "estimate_sigma_averaged",
    "GaussParams",
    "NlmParams",
    "gaussian_smooth",
    "nlm_denoise",
    "nlm_denoise_reference",
    "WaveletFilterBank",
    "WaveletParams",
    "WaveletPyramid",
    "daubechies2",
    "dwt2",
    "dwt2_reference",
    "idwt2",
    "select_threshold",
    "soft_threshold",
    "wavelet_denoise",
    "MetricParams",
    "MetricReport",
    "psnr",
    "ssim",
    "cw_ssim",
    "summer_like",
    "evaluate_metrics",
    "BenchConfig",
    "BenchResult",
    "parse_config",
    "run_bench",
    "emit_tables",
    "__version__",
]
