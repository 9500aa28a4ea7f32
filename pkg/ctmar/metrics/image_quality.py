"""Image and sinogram quality metrics.

PSNR and SSIM are computed on soft-tissue-windowed images mapped to [0, 1].
"""
from __future__ import annotations

import math

import numpy as np
from skimage.metrics import structural_similarity
from skimage.util import img_as_ubyte

from ctmar.errors import InvalidInputError
from ctmar.models.enums import GridUnit
from ctmar.models.grids import Image, Sinogram, require_same_shape
from ctmar.settings import settings

WINDOW_LO_HU = -175.0
WINDOW_HI_HU = 275.0
SSIM_SIGMA = 1.5
SSIM_WINDOW = 11
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def window_image(img: Image, lo: float = WINDOW_LO_HU, hi: float = WINDOW_HI_HU) -> Image:
    img.require_unit(GridUnit.HU, "window_image input")
    if not lo < hi:
        raise InvalidInputError(f"window bounds must satisfy lo < hi, got [{lo}, {hi}]")
    return Image((np.clip(img.values, lo, hi) - lo) / (hi - lo), GridUnit.NORMALIZED)


def _db(mse: float, peak: float, cap: float) -> float:
    if mse <= 0.0:
        return cap
    return min(10.0 * math.log10(peak**2 / mse), cap)


def psnr(a: Image, b: Image, lo: float = WINDOW_LO_HU, hi: float = WINDOW_HI_HU,
         cap: float = settings.psnr_cap_db) -> float:
    """Windowed PSNR in dB; identical images give `cap` instead of infinity"""
    require_same_shape("psnr inputs", a, b)
    wa, wb = window_image(a, lo, hi).values, window_image(b, lo, hi).values
    return _db(float(np.mean((wa - wb) ** 2)), 1.0, cap)


def ssim(a: Image, b: Image, lo: float = WINDOW_LO_HU, hi: float = WINDOW_HI_HU) -> float:
    """Mean SSIM of the windowed images: Gaussian window σ=1.5 (11 taps), K1=0.01, K2=0.03"""
    require_same_shape("ssim inputs", a, b)
    if min(a.shape) < SSIM_WINDOW:
        raise InvalidInputError(f"ssim needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {a.shape}")
    return float(
        structural_similarity(
            window_image(a, lo, hi).values,
            window_image(b, lo, hi).values,
            data_range=1.0,
            win_size=SSIM_WINDOW,
            gaussian_weights=True,
            sigma=SSIM_SIGMA,
            use_sample_covariance=False,
            K1=SSIM_K1,
            K2=SSIM_K2,
        )
    )


def sino_mse(s_a: Sinogram, s_b: Sinogram, trace: Sinogram | None = None) -> float:
    """Mean squared difference, optionally over trace bins only (0.0 for an empty trace)"""
    require_same_shape("sino_mse inputs", s_a, s_b)
    diff = (s_a.values - s_b.values) ** 2
    if trace is None:
        return float(np.mean(diff))
    require_same_shape("sino_mse trace", s_a, trace)
    on_trace = trace.support()
    if not on_trace.any():
        return 0.0
    return float(np.mean(diff[on_trace]))


def reference_psnr(a: np.ndarray | Image, b: np.ndarray | Image, data_range: float,
                   region: np.ndarray | None = None, cap: float = settings.psnr_cap_db) -> float:
    """Un-windowed PSNR with an explicit data range, optionally inside a boolean region"""
    va = a.values if isinstance(a, Image) else np.asarray(a, dtype=np.float64)
    vb = b.values if isinstance(b, Image) else np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise InvalidInputError(f"reference_psnr inputs differ in shape: {va.shape} vs {vb.shape}")
    if data_range <= 0:
        raise InvalidInputError(f"data_range must be positive, got {data_range}")
    diff = (va - vb) ** 2
    if region is not None:
        diff = diff[np.asarray(region, dtype=bool)]
    return _db(float(np.mean(diff)), data_range, cap)


def preview_bytes(img: Image, lo: float = WINDOW_LO_HU, hi: float = WINDOW_HI_HU) -> np.ndarray:
    """8-bit windowed rendering for human inspection"""
    return img_as_ubyte(window_image(img, lo, hi).values)
