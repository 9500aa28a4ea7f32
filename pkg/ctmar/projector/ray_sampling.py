"""Joseph-style ray sampling: every ray is sampled at half-pixel steps and each sample
bilinearly interpolates the image.

Images are zero-padded by one pixel on every side before sampling, so a sample whose
four neighbours straddle the image border still reads only valid memory; samples that
fall further outside are dropped from the plan.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ctmar.models.enums import BeamModel
from ctmar.models.geometry import Geometry
from ctmar.utils import not_none


@dataclass(frozen=True, eq=False)
class RayPlan:
    """Interpolation plan of one projection angle.

    base indexes the top-left neighbour in the padded image; fx and fy are the fractional
    offsets toward the next column and row.
    """
    ray: np.ndarray  # int32, detector index of each sample
    base: np.ndarray  # int32
    fx: np.ndarray
    fy: np.ndarray

    @property
    def n_samples(self) -> int:
        return int(self.ray.shape[0])

    @property
    def nbytes(self) -> int:
        return self.ray.nbytes + self.base.nbytes + self.fx.nbytes + self.fy.nbytes


def sample_step(geo: Geometry) -> float:
    return geo.pixel_size / 2.0


def sample_offsets(geo: Geometry) -> np.ndarray:
    """Positions t along each ray, covering the image diagonal symmetrically"""
    half_diagonal = geo.image_size * geo.pixel_size / math.sqrt(2.0)
    step = sample_step(geo)
    n_half = int(math.ceil(half_diagonal / step))
    return step * np.arange(-n_half, n_half + 1, dtype=np.float64)


def ray_parameters(geo: Geometry, angle_index: int) -> tuple[np.ndarray, np.ndarray]:
    """(theta, s) of every ray at one angle: direction normal and signed distance from the centre"""
    angle = geo.angles()[angle_index]
    positions = geo.detector_positions()
    if geo.beam_model == BeamModel.PARALLEL:
        return np.full(geo.n_detectors, angle), positions
    distance = not_none(geo.source_distance, "source_distance of a fan-beam geometry")
    gamma = positions / distance
    return angle + gamma, distance * np.sin(gamma)


def build_plan(geo: Geometry, angle_index: int) -> RayPlan:
    theta, s = ray_parameters(geo, angle_index)
    t = sample_offsets(geo)
    cos_t = np.cos(theta)[:, None]
    sin_t = np.sin(theta)[:, None]
    x = s[:, None] * cos_t - t[None, :] * sin_t
    y = s[:, None] * sin_t + t[None, :] * cos_t

    n = geo.image_size
    centre = (n - 1) / 2.0
    col = x / geo.pixel_size + centre
    row = y / geo.pixel_size + centre
    c0 = np.floor(col)
    r0 = np.floor(row)
    keep = (c0 >= -1) & (c0 <= n - 1) & (r0 >= -1) & (r0 <= n - 1)

    ray = np.broadcast_to(np.arange(geo.n_detectors, dtype=np.int32)[:, None], keep.shape)[keep]
    c0k = c0[keep].astype(np.int32)
    r0k = r0[keep].astype(np.int32)
    width = n + 2
    return RayPlan(
        ray=np.ascontiguousarray(ray),
        base=(r0k + 1) * width + (c0k + 1),
        fx=col[keep] - c0[keep],
        fy=row[keep] - r0[keep],
    )
