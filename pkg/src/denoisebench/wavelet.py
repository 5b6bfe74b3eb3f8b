"""Daubechies db2 fast wavelet transform, soft thresholding, and denoiser.

The 2-D transform is separable: each level filters along x (axis 1) then y
(axis 0) and keeps every other output sample. Two boundary modes exist:

* ``symmetric`` (default): half-sample symmetric extension. Each band at a
  level has ceil(n/2) + 1 samples per axis; the extra boundary sample per
  band is what makes the inverse exact for the asymmetric db2 filters.
* ``periodic``: circular extension, bands have exactly n/2 samples per
  axis (even lengths only). The transform is orthonormal in this mode,
  which the energy tests rely on.

Reconstruction restores the recorded original shape exactly in both modes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .raster import Image

MODES = ("symmetric", "periodic")


@dataclass(frozen=True)
class WaveletFilterBank:
    """Orthogonal two-channel filter bank.

    Analysis filters are applied by correlation; synthesis filters are the
    time-reversed analysis filters and are applied by correlation as well,
    which together realize the orthogonal expansion/reconstruction pair.
    """

    lowpass_analysis: tuple[float, ...]
    highpass_analysis: tuple[float, ...]
    lowpass_synthesis: tuple[float, ...]
    highpass_synthesis: tuple[float, ...]

    def __post_init__(self):
        n = len(self.lowpass_analysis)
        for f in (self.highpass_analysis, self.lowpass_synthesis, self.highpass_synthesis):
            if len(f) != n:
                raise ValueError("filter lengths differ")


def daubechies2() -> WaveletFilterBank:
    """The 4-tap Daubechies-2 bank (orthonormal, two vanishing moments).

    Lowpass = [1+sqrt(3), 3+sqrt(3), 3-sqrt(3), 1-sqrt(3)] / (4 sqrt(2));
    highpass follows from the quadrature-mirror relation
    g[k] = (-1)^k h[L-1-k].
    """
    s3 = math.sqrt(3.0)
    norm = 4.0 * math.sqrt(2.0)
    h = ((1.0 + s3) / norm, (3.0 + s3) / norm, (3.0 - s3) / norm, (1.0 - s3) / norm)
    g = tuple((-1.0) ** k * h[len(h) - 1 - k] for k in range(len(h)))
    return WaveletFilterBank(
        lowpass_analysis=h,
        highpass_analysis=g,
        lowpass_synthesis=h[::-1],
        highpass_synthesis=g[::-1],
    )


_DB2 = daubechies2()


@dataclass
class WaveletPyramid:
    """Multilevel subband decomposition of one gray plane.

    ``details[i]`` holds level i+1 (finest first) as (lh, hl, hh) where the
    first letter is the x-axis filter and the second the y-axis filter;
    hh is the diagonal band. ``level_shapes[i]`` records the shape of the
    plane that level i+1 decomposed, which the inverse uses to crop.
    """

    approx: np.ndarray
    details: tuple[tuple[np.ndarray, np.ndarray, np.ndarray], ...]
    level_shapes: tuple[tuple[int, int], ...]
    original_shape: tuple[int, int]
    mode: str = "symmetric"

    @property
    def levels(self) -> int:
        return len(self.details)


@dataclass(frozen=True)
class WaveletParams:
    """Knobs for wavelet_denoise.

    levels=None picks min(4, floor(log2(min(w, h))) - 2). sigma_est is the
    noise standard deviation on the 0-255 scale; when None it is estimated
    from the finest diagonal subband (per-channel estimates averaged for
    RGB input). Only soft thresholding is offered.
    """

    levels: int | None = None
    threshold_policy: str = "bayes"
    sigma_est: float | None = None
    mode: str = "soft"

    def __post_init__(self):
        if self.levels is not None and self.levels < 1:
            raise ValueError("levels must be >= 1")
        if self.threshold_policy not in ("bayes", "universal"):
            raise ValueError(f"unknown threshold policy {self.threshold_policy!r}")
        if self.sigma_est is not None and self.sigma_est < 0:
            raise ValueError("sigma_est must be >= 0")
        if self.mode != "soft":
            raise ValueError("only soft thresholding is supported")


def default_levels(height: int, width: int) -> int:
    return min(4, int(math.floor(math.log2(min(width, height)))) - 2)


def _corr_valid(a: np.ndarray, filt: np.ndarray) -> np.ndarray:
    """Correlation along the last axis, fully-overlapping positions only."""
    n = a.shape[-1] - filt.size + 1
    out = filt[0] * a[..., 0:n]
    for k in range(1, filt.size):
        out += filt[k] * a[..., k : k + n]
    return out


def _analyze_last(a: np.ndarray, filt: np.ndarray, mode: str) -> np.ndarray:
    """One analysis channel along the last axis: extend, correlate, decimate."""
    L = filt.size
    pad = [(0, 0)] * (a.ndim - 1)
    if mode == "symmetric":
        xe = np.pad(a, pad + [(L - 1, L - 1)], mode="symmetric")
        return _corr_valid(xe, filt)[..., 1::2]
    n = a.shape[-1]
    if n % 2:
        raise ValueError("periodic mode requires even lengths at every level")
    xe = np.pad(a, pad + [(0, L - 1)], mode="wrap")
    return _corr_valid(xe, filt)[..., 0::2]


def _synthesize_last(
    lo: np.ndarray,
    hi: np.ndarray,
    bank: WaveletFilterBank,
    n_out: int,
    mode: str,
) -> np.ndarray:
    """Invert one split along the last axis: upsample, filter, crop to n_out."""
    lo_f = np.asarray(bank.lowpass_synthesis, dtype=np.float64)
    hi_f = np.asarray(bank.highpass_synthesis, dtype=np.float64)
    L = lo_f.size
    m = lo.shape[-1]
    if hi.shape[-1] != m:
        raise ValueError("band shapes inconsistent")
    pad = [(0, 0)] * (lo.ndim - 1)
    if mode == "symmetric":
        up_shape = lo.shape[:-1] + (2 * m - 1,)
        ul = np.zeros(up_shape)
        uh = np.zeros(up_shape)
        ul[..., ::2] = lo
        uh[..., ::2] = hi
        zl = _corr_valid(np.pad(ul, pad + [(L - 1, L - 1)]), lo_f)
        zh = _corr_valid(np.pad(uh, pad + [(L - 1, L - 1)]), hi_f)
        z = zl + zh
        if n_out + 2 > z.shape[-1]:
            raise ValueError("band too short for requested output length")
        return z[..., 2 : 2 + n_out]
    n = 2 * m
    if n_out != n:
        raise ValueError("periodic bands must be exactly half the output length")
    up_shape = lo.shape[:-1] + (n,)
    ul = np.zeros(up_shape)
    uh = np.zeros(up_shape)
    ul[..., ::2] = lo
    uh[..., ::2] = hi
    zl = _corr_valid(np.pad(ul, pad + [(L - 1, 0)], mode="wrap"), lo_f)
    zh = _corr_valid(np.pad(uh, pad + [(L - 1, 0)], mode="wrap"), hi_f)
    return zl + zh


def _analyze_axis(a, filt, axis, mode):
    return np.moveaxis(_analyze_last(np.moveaxis(a, axis, -1), filt, mode), -1, axis)


def _synthesize_axis(lo, hi, bank, n_out, axis, mode):
    out = _synthesize_last(
        np.moveaxis(lo, axis, -1), np.moveaxis(hi, axis, -1), bank, n_out, mode
    )
    return np.moveaxis(out, -1, axis)


def _split_plane(plane, bank, mode):
    lo_a = np.asarray(bank.lowpass_analysis, dtype=np.float64)
    hi_a = np.asarray(bank.highpass_analysis, dtype=np.float64)
    lx = _analyze_axis(plane, lo_a, 1, mode)
    hx = _analyze_axis(plane, hi_a, 1, mode)
    ll = _analyze_axis(lx, lo_a, 0, mode)
    lh = _analyze_axis(lx, hi_a, 0, mode)
    hl = _analyze_axis(hx, lo_a, 0, mode)
    hh = _analyze_axis(hx, hi_a, 0, mode)
    return ll, (lh, hl, hh)


def _merge_plane(ll, bands, bank, shape, mode):
    lh, hl, hh = bands
    lx = _synthesize_axis(ll, lh, bank, shape[0], 0, mode)
    hx = _synthesize_axis(hl, hh, bank, shape[0], 0, mode)
    return _synthesize_axis(lx, hx, bank, shape[1], 1, mode)


def _check_feasible(shape: tuple[int, int], levels: int, mode: str) -> None:
    h, w = shape
    for lvl in range(levels):
        if min(h, w) < 4:
            raise ValueError(
                f"level {lvl + 1} infeasible: plane is {h}x{w}, need at least 4x4"
            )
        if mode == "symmetric":
            h = h // 2 + 1
            w = w // 2 + 1
        else:
            if h % 2 or w % 2:
                raise ValueError("periodic mode requires even lengths at every level")
            h //= 2
            w //= 2


def dwt2(
    img: Image,
    bank: WaveletFilterBank | None = None,
    levels: int = 1,
    mode: str = "symmetric",
) -> WaveletPyramid:
    """Multilevel separable analysis of a gray image.

    Raises ValueError when the requested level count is infeasible for the
    image size (each level needs a plane of at least 4x4).
    """
    if img.channels != 1:
        raise ValueError("dwt2 expects a gray image; convert first")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    bank = bank or _DB2
    plane = np.asarray(img.planes[0], dtype=np.float64)
    _check_feasible(plane.shape, levels, mode)
    details = []
    shapes = []
    approx = plane
    for _ in range(levels):
        shapes.append(approx.shape)
        approx, bands = _split_plane(approx, bank, mode)
        details.append(bands)
    return WaveletPyramid(
        approx=approx,
        details=tuple(details),
        level_shapes=tuple(shapes),
        original_shape=plane.shape,
        mode=mode,
    )


def idwt2(pyr: WaveletPyramid, bank: WaveletFilterBank | None = None) -> Image:
    """Synthesis mirror of dwt2; restores the original shape exactly.

    No clamping happens here: out-of-range samples produced by coefficient
    edits are preserved so the caller decides when to clamp.
    """
    bank = bank or _DB2
    if len(pyr.details) != len(pyr.level_shapes) or not pyr.details:
        raise ValueError("pyramid is malformed")
    plane = pyr.approx
    for bands, shape in zip(reversed(pyr.details), reversed(pyr.level_shapes)):
        plane = _merge_plane(plane, bands, bank, shape, pyr.mode)
    if plane.shape != pyr.original_shape:
        raise ValueError("pyramid shapes inconsistent with original_shape")
    return Image.from_gray(plane)


def dwt2_reference(
    img: Image,
    bank: WaveletFilterBank | None = None,
    levels: int = 1,
    mode: str = "symmetric",
) -> WaveletPyramid:
    """Direct convolve-and-downsample analysis; oracle for dwt2.

    Same contract as dwt2, realized with explicit per-sample loops. Slow;
    meant for equivalence tests on small planes.
    """
    if img.channels != 1:
        raise ValueError("dwt2_reference expects a gray image")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    bank = bank or _DB2
    lo = np.asarray(bank.lowpass_analysis)
    hi = np.asarray(bank.highpass_analysis)
    L = lo.size

    def analyze_vec(vec, filt):
        n = vec.size
        if mode == "symmetric":
            xe = np.pad(vec, (L - 1, L - 1), mode="symmetric")
            starts = range(1, n + L - 1, 2)
        else:
            if n % 2:
                raise ValueError("periodic mode requires even lengths")
            xe = np.pad(vec, (0, L - 1), mode="wrap")
            starts = range(0, n, 2)
        out = []
        for s in starts:
            acc = 0.0
            for k in range(L):
                acc += filt[k] * xe[s + k]
            out.append(acc)
        return np.array(out)

    def analyze_rows(mat, filt):
        return np.stack([analyze_vec(row, filt) for row in mat])

    def analyze_cols(mat, filt):
        return np.stack([analyze_vec(col, filt) for col in mat.T]).T

    plane = np.asarray(img.planes[0], dtype=np.float64)
    _check_feasible(plane.shape, levels, mode)
    details = []
    shapes = []
    approx = plane
    for _ in range(levels):
        shapes.append(approx.shape)
        lx = analyze_rows(approx, lo)
        hx = analyze_rows(approx, hi)
        ll = analyze_cols(lx, lo)
        lh = analyze_cols(lx, hi)
        hl = analyze_cols(hx, lo)
        hh = analyze_cols(hx, hi)
        details.append((lh, hl, hh))
        approx = ll
    return WaveletPyramid(
        approx=approx,
        details=tuple(details),
        level_shapes=tuple(shapes),
        original_shape=plane.shape,
        mode=mode,
    )


def soft_threshold(coeffs: np.ndarray, lam: float) -> np.ndarray:
    """Shrink coefficients toward zero: keep sign, subtract lam, floor at 0."""
    if lam < 0:
        raise ValueError("threshold must be >= 0")
    coeffs = np.asarray(coeffs)
    mag = np.abs(coeffs)
    return np.where(mag >= lam, np.sign(coeffs) * (mag - lam), 0.0)


def select_threshold(
    detail_plane: np.ndarray,
    sigma_norm: float,
    policy: str = "bayes",
    n_total: int | None = None,
) -> float:
    """Per-subband threshold from the noise level (normalized units).

    bayes: lam = sigma^2 / sigma_x with sigma_x^2 = max(mean(w^2) - sigma^2, 0);
    a subband indistinguishable from pure noise (sigma_x = 0) is annihilated
    by lam = max|w|. universal: lam = sigma * sqrt(2 ln N) with N the total
    sample count of the image (defaults to the plane size).
    """
    plane = np.asarray(detail_plane, dtype=np.float64)
    if plane.size == 0:
        raise ValueError("empty coefficient plane")
    if sigma_norm < 0:
        raise ValueError("sigma_norm must be >= 0")
    if policy == "universal":
        n = plane.size if n_total is None else n_total
        return float(sigma_norm * math.sqrt(2.0 * math.log(n)))
    if policy != "bayes":
        raise ValueError(f"unknown threshold policy {policy!r}")
    m2 = float(np.mean(plane * plane))
    sigma_x = math.sqrt(max(m2 - sigma_norm * sigma_norm, 0.0))
    if sigma_x == 0.0:
        return float(np.max(np.abs(plane)))
    return float(sigma_norm * sigma_norm / sigma_x)


def _denoise_plane(plane, p, sigma_norm, bank):
    img = Image.from_gray(plane)
    levels = p.levels if p.levels is not None else default_levels(img.height, img.width)
    pyr = dwt2(img, bank=bank, levels=levels)
    n_total = img.height * img.width
    new_details = []
    for bands in pyr.details:
        out_bands = []
        for band in bands:
            lam = select_threshold(band, sigma_norm, p.threshold_policy, n_total=n_total)
            out_bands.append(soft_threshold(band, lam))
        new_details.append(tuple(out_bands))
    cleaned = WaveletPyramid(
        approx=pyr.approx,
        details=tuple(new_details),
        level_shapes=pyr.level_shapes,
        original_shape=pyr.original_shape,
        mode=pyr.mode,
    )
    return np.clip(idwt2(cleaned, bank=bank).planes[0], 0.0, 1.0)


def wavelet_denoise(img: Image, p: WaveletParams | None = None) -> Image:
    """Denoise by soft-thresholding detail subbands; approximation untouched.

    RGB images are processed per channel with a shared noise estimate
    (mean of the per-channel estimates) unless sigma_est is given.
    """
    p = p or WaveletParams()
    if p.sigma_est is not None:
        sigma255 = p.sigma_est
    else:
        from .noise import estimate_sigma_averaged

        sigma255 = estimate_sigma_averaged(img)
    sigma_norm = sigma255 / 255.0
    bank = _DB2
    return Image.from_planes(
        [_denoise_plane(plane, p, sigma_norm, bank) for plane in img.planes]
    )
