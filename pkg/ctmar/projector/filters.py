"""Ram-Lak ramp filter built from its band-limited spatial kernel, optional Hann apodisation."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import fft

from ctmar.errors import DimensionMismatchError
from ctmar.models.enums import FilterWindow
from ctmar.models.geometry import Geometry
from ctmar.models.grids import Sinogram


def padded_length(n_detectors: int) -> int:
    """Smallest power of two >= 2 * n_detectors, so linear convolution never wraps"""
    return 1 << int(math.ceil(math.log2(max(2 * n_detectors, 2))))


def _ram_lak_kernel(n_pad: int, spacing: float) -> np.ndarray:
    n = np.arange(n_pad)
    lag = np.minimum(n, n_pad - n)
    kernel = np.zeros(n_pad)
    kernel[0] = 1.0 / (4.0 * spacing**2)
    odd = lag % 2 == 1
    kernel[odd] = -1.0 / (math.pi**2 * lag[odd].astype(np.float64) ** 2 * spacing**2)
    return kernel


@dataclass(frozen=True, eq=False)
class RampFilter:
    """Frequency response over the n_pad FFT bins; real, even and zero at DC"""
    n_detectors: int
    detector_spacing: float
    window: FilterWindow
    n_pad: int
    response: np.ndarray

    @classmethod
    def build(cls, n_detectors: int, detector_spacing: float = 1.0,
              window: FilterWindow = FilterWindow.RAMP) -> RampFilter:
        n_pad = padded_length(n_detectors)
        response = detector_spacing * np.real(fft.fft(_ram_lak_kernel(n_pad, detector_spacing)))
        # exact even symmetry; the kernel is symmetric so this only removes round-off
        response = 0.5 * (response + np.roll(response[::-1], 1))
        if window == FilterWindow.HANN:
            freq = np.minimum(np.arange(n_pad), n_pad - np.arange(n_pad)) / n_pad
            response = response * 0.5 * (1.0 + np.cos(2.0 * math.pi * freq))
        response[0] = 0.0
        response.setflags(write=False)
        return cls(n_detectors, detector_spacing, window, n_pad, response)

    @classmethod
    def for_geometry(cls, geo: Geometry, window: FilterWindow = FilterWindow.RAMP) -> RampFilter:
        return cls.build(geo.n_detectors, geo.detector_spacing, window)

    def require_detectors(self, n_detectors: int) -> RampFilter:
        if n_detectors != self.n_detectors:
            raise DimensionMismatchError("ramp filter", (self.n_detectors,), (n_detectors,))
        return self


def filter_rows(values: np.ndarray, filt: RampFilter) -> np.ndarray:
    """Filter every angle row along the detector axis; self-adjoint"""
    filt.require_detectors(values.shape[1])
    half = filt.response[: filt.n_pad // 2 + 1]
    spectrum = fft.rfft(values, n=filt.n_pad, axis=1)
    return fft.irfft(spectrum * half, n=filt.n_pad, axis=1)[:, : filt.n_detectors]


def filter_sinogram(sino: Sinogram, filt: RampFilter) -> Sinogram:
    return sino.with_values(filter_rows(sino.values, filt))
