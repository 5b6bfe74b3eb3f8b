"""Synthetic Gaussian noise and robust noise-level estimation.

Noise levels are quoted on the 0-255 scale throughout ("sigma 15" means a
standard deviation of 15 gray levels); internally samples stay in [0, 1].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import Image
from .wavelet import dwt2

MAD_TO_SIGMA = 0.6745  # Phi^-1(0.75): scales the median absolute deviation


@dataclass(frozen=True)
class NoiseSpec:
    """Seeded additive Gaussian noise on the 0-255 scale.

    The seed-to-stream mapping is frozen as numpy's default_rng (PCG64):
    one generator per call, one normal draw per sample, channel-major then
    row-major order. Identical (spec, image) pairs give identical output.
    """

    sigma255: float
    seed: int
    clamp: bool = True

    def __post_init__(self):
        if not self.sigma255 > 0:
            raise ValueError("sigma255 must be > 0")


def add_gaussian_noise(img: Image, spec: NoiseSpec) -> Image:
    rng = np.random.default_rng(spec.seed)
    sigma = spec.sigma255 / 255.0
    out = []
    for plane in img.planes:
        noisy = plane + rng.normal(0.0, sigma, size=plane.shape)
        if spec.clamp:
            noisy = np.clip(noisy, 0.0, 1.0)
        out.append(noisy)
    return Image.from_planes(out)


def _mad_sigma(plane: np.ndarray) -> float:
    """Robust std estimate of a coefficient plane: median(|w|) / 0.6745."""
    return float(np.median(np.abs(plane)) / MAD_TO_SIGMA)


def estimate_sigma(img: Image) -> float:
    """Noise std on the 0-255 scale, from the finest diagonal subband.

    Applies one level of the db2 transform and returns
    255 * median(|HH|) / 0.6745 -- the standard robust estimator for
    additive Gaussian noise. Gray input only; average per-channel
    estimates for color (see estimate_sigma_averaged).
    """
    if img.channels != 1:
        raise ValueError("estimate_sigma expects a gray image")
    if min(img.width, img.height) < 4:
        raise ValueError("image too small for one decomposition level")
    pyr = dwt2(img, levels=1)
    hh = pyr.details[0][2]
    return 255.0 * _mad_sigma(hh)


def estimate_sigma_averaged(img: Image) -> float:
    """estimate_sigma on gray input; mean of per-channel estimates on RGB."""
    if img.channels == 1:
        return estimate_sigma(img)
    ests = [estimate_sigma(Image.from_gray(p)) for p in img.planes]
    return float(sum(ests) / len(ests))
