"""Sinogram padding: cyclic along angles (zeros in the non-periodic baseline), zeros along detectors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ctmar.errors import InvalidInputError, PeriodicityError
from ctmar.models.enums import BeamModel, PadMode
from ctmar.models.geometry import Geometry
from ctmar.models.grids import Sinogram


@dataclass(frozen=True, eq=False)
class PaddedSinogram:
    sinogram: Sinogram
    pad_a: int
    pad_d: int

    @property
    def values(self) -> np.ndarray:
        return self.sinogram.values

    @property
    def shape(self) -> tuple[int, int]:
        return self.sinogram.shape

    def interior(self) -> Sinogram:
        """The source grid, cropped back out of the margins"""
        h, w = self.shape
        return self.sinogram.with_values(self.values[self.pad_a : h - self.pad_a, self.pad_d : w - self.pad_d])


def _angle_margins(values: np.ndarray, pad_a: int, geo: Geometry, mode: PadMode) -> np.ndarray:
    if mode == PadMode.ZERO:
        return np.pad(values, ((pad_a, pad_a), (0, 0)), mode="constant", constant_values=0.0)

    if mode == PadMode.PERIODIC:
        if not geo.is_full_turn:
            raise PeriodicityError(
                f"periodic padding needs a full-turn scan, geometry spans {geo.angle_range:.6f} rad"
            )
        return np.pad(values, ((pad_a, pad_a), (0, 0)), mode="wrap")

    if geo.beam_model != BeamModel.PARALLEL or not geo.is_half_turn:
        raise PeriodicityError("flip-wrap padding needs a parallel-beam half-turn scan")
    # S(θ + π, s) = S(θ, -s): rows beyond either end come back with the detector axis reversed
    n = values.shape[0]
    top = values[n - pad_a :, ::-1]
    bottom = values[:pad_a, ::-1]
    return np.concatenate([top, values, bottom], axis=0)


def periodic_pad(
    sino: Sinogram, pad_a: int, pad_d: int, geo: Geometry, mode: PadMode = PadMode.PERIODIC
) -> PaddedSinogram:
    sino.require_geometry(geo, "padding input")
    if pad_a < 0 or pad_d < 0:
        raise InvalidInputError(f"pad sizes must be nonnegative, got ({pad_a}, {pad_d})")
    if pad_a >= geo.n_angles:
        raise InvalidInputError(f"angle padding {pad_a} must be smaller than n_angles {geo.n_angles}")
    values = _angle_margins(sino.values, pad_a, geo, PadMode(mode))
    values = np.pad(values, ((0, 0), (pad_d, pad_d)), mode="constant", constant_values=0.0)
    return PaddedSinogram(sino.with_values(values), pad_a, pad_d)
