from __future__ import annotations

import logging

from ctmar.core.units import mu_to_hu
from ctmar.errors import ConfigError
from ctmar.marbase.li import li_inpaint, prepare_trace
from ctmar.marbase.nmar import nmar_inpaint, nmar_prior
from ctmar.models.case import IngestedCase, MarResult, SimCase
from ctmar.models.enums import MarMethod, PriorSource
from ctmar.models.geometry import Geometry
from ctmar.models.grids import Image, Sinogram
from ctmar.models.run_config import MarConfig
from ctmar.projector.fbp import fbp
from ctmar.projector.filters import RampFilter
from ctmar.settings import settings

logger = logging.getLogger(__name__)


def parse_method(method: MarMethod | str) -> MarMethod:
    try:
        return MarMethod(method)
    except ValueError:
        known = ", ".join(m.value for m in MarMethod)
        raise ConfigError(f"unknown MAR method '{method}'; expected one of: {known}") from None


def correct_case(
    case: SimCase | IngestedCase,
    method: MarMethod | str,
    geo: Geometry,
    filt: RampFilter | None = None,
    options: MarConfig = MarConfig(),
    *,
    mu_water: float = settings.mu_water,
    workers: int = 1,
) -> MarResult:
    """Run one classical baseline on a case: trace prep, inpainting, FBP, HU conversion"""
    method = parse_method(method)
    filt = filt or RampFilter.for_geometry(geo)

    def reconstruct(sino: Sinogram) -> Image:
        return mu_to_hu(fbp(sino, geo, filt, workers), mu_water)

    trace = prepare_trace(case.m_t, options.trace_dilation)
    li = li_inpaint(case.s_ma, trace, geo)
    if method == MarMethod.LI:
        logger.debug("[case %s] LI done, %s fallback row(s)", case.case_id, len(li.fallback_rows))
        return MarResult(case.case_id, li.sinogram, reconstruct(li.sinogram), None, li.fallback_rows)

    if options.prior_source == PriorSource.LI:
        source = reconstruct(li.sinogram)
    elif isinstance(case, SimCase):
        source = case.x_ma
    else:
        source = reconstruct(case.s_ma)
    prior = nmar_prior(
        source,
        options.air_hu,
        options.bone_hu,
        options.smooth_sigma,
        mask=case.mask,
        metal_hu=options.metal_hu,
        bone_mu_factor=options.bone_mu_factor,
        mu_water=mu_water,
    )
    result = nmar_inpaint(case.s_ma, trace, prior, geo, workers)
    logger.debug("[case %s] NMAR done, prior from %s image", case.case_id, options.prior_source.value)
    return MarResult(case.case_id, result.sinogram, reconstruct(result.sinogram), prior, result.fallback_rows)
