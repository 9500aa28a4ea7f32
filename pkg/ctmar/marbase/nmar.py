"""Normalized MAR: inpaint S_ma / P(prior) instead of S_ma, then undo the normalization."""
from __future__ import annotations

import logging

import numpy as np
from scipy.ndimage import gaussian_filter

from ctmar.errors import InvalidInputError
from ctmar.marbase.li import li_inpaint
from ctmar.models.case import InpaintResult, PriorImage
from ctmar.models.enums import GridUnit, PriorProvenance
from ctmar.models.geometry import Geometry
from ctmar.models.grids import Image, MetalMask, Sinogram, require_same_shape
from ctmar.projector.projector import get_projector
from ctmar.settings import settings

logger = logging.getLogger(__name__)

# relative to mu_water; keeps the prior strictly positive in air
PRIOR_FLOOR = 1e-3
DIVIDE_GUARD = 1e-6


def nmar_prior(
    x_hu: Image,
    air_hu: float = -500.0,
    bone_hu: float = 350.0,
    smooth_sigma: float = 1.0,
    *,
    mask: MetalMask | None = None,
    metal_hu: float = 2500.0,
    bone_mu_factor: float = 2.0,
    mu_water: float = settings.mu_water,
) -> PriorImage:
    """Three-class tissue prior: air -> 0, soft tissue -> mu_water, bone -> bone_mu_factor * mu_water.

    Metal (the given mask, else pixels >= metal_hu) is assigned soft tissue before smoothing.
    """
    x_hu.require_unit(GridUnit.HU, "prior source image")
    if not air_hu < bone_hu:
        raise InvalidInputError(f"prior cutpoints must be ascending, got air {air_hu} and bone {bone_hu}")
    hu = x_hu.values
    prior = np.full(hu.shape, mu_water)
    prior[hu < air_hu] = 0.0
    prior[hu > bone_hu] = bone_mu_factor * mu_water
    metal = mask.as_bool() if mask is not None else hu >= metal_hu
    prior[metal] = mu_water
    if smooth_sigma > 0:
        prior = gaussian_filter(prior, smooth_sigma)
    prior = np.maximum(prior, PRIOR_FLOOR * mu_water)
    return PriorImage(Image(prior, GridUnit.ATTENUATION), PriorProvenance.THRESHOLD_SEGMENTED)


def nmar_inpaint_normalized(
    s_ma: Sinogram, m_t: Sinogram, prior_sino: Sinogram, geo: Geometry | None = None
) -> InpaintResult:
    """Normalize by the prior projection, interpolate, de-normalize; off-trace bins stay S_ma"""
    require_same_shape("nmar inputs", s_ma, m_t, prior_sino)
    trace = m_t.support()
    if not trace.any():
        return InpaintResult(s_ma)
    projected = prior_sino.values
    positive = projected[projected > 0]
    if positive.size == 0:
        raise InvalidInputError("prior projection has no positive entries")
    denominator = np.maximum(projected, DIVIDE_GUARD * float(np.median(positive)))

    normalized = s_ma.with_values(s_ma.values / denominator, GridUnit.DIMENSIONLESS)
    inpainted = li_inpaint(normalized, m_t, geo)
    values = inpainted.sinogram.values * denominator
    values[~trace] = s_ma.values[~trace]
    return InpaintResult(s_ma.with_values(values), inpainted.fallback_rows)


def nmar_inpaint(
    s_ma: Sinogram, m_t: Sinogram, prior: PriorImage, geo: Geometry, workers: int = 1
) -> InpaintResult:
    prior.image.require_geometry(geo, "prior image")
    projected = Sinogram(get_projector(geo, workers).forward(prior.image.values), GridUnit.LINE_INTEGRAL)
    return nmar_inpaint_normalized(s_ma, m_t, projected, geo)
