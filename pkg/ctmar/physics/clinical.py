"""Clinical slices: threshold the metal, project with the simulation geometry."""
from __future__ import annotations

import logging

import numpy as np

from ctmar.core.units import hu_to_mu
from ctmar.models.case import IngestedCase
from ctmar.models.enums import GridUnit, IngestFlag
from ctmar.models.geometry import Geometry
from ctmar.models.grids import Image, MetalMask, Sinogram
from ctmar.models.run_config import IngestConfig
from ctmar.physics.simulation import metal_mask_projection, metal_trace
from ctmar.projector.projector import get_projector
from ctmar.settings import settings

logger = logging.getLogger(__name__)


def clinical_ingest(
    x_clinical: Image,
    geo: Geometry,
    config: IngestConfig = IngestConfig(),
    *,
    case_id: str = "case",
    mu_water: float = settings.mu_water,
    workers: int = 1,
) -> IngestedCase:
    """S_ma = P(hu_to_mu(X)), M = X >= metal threshold; problems become flags, not errors"""
    x_clinical.require_unit(GridUnit.HU, "clinical image").require_geometry(geo, "clinical image")
    flags: list[IngestFlag] = []

    mask = MetalMask.from_bool(x_clinical.values >= config.metal_hu_threshold)
    if mask.is_empty:
        logger.warning("[case %s] no pixels at or above %s HU; metal mask is empty",
                       case_id, config.metal_hu_threshold)
        flags.append(IngestFlag.EMPTY_METAL)

    selected = int(np.count_nonzero(x_clinical.values > config.selection_hu))
    if selected < config.selection_min_pixels:
        logger.warning("[case %s] only %s pixels above %s HU (selection criterion %s)",
                       case_id, selected, config.selection_hu, config.selection_min_pixels)
        flags.append(IngestFlag.BELOW_SELECTION_CRITERION)

    mu = hu_to_mu(x_clinical, mu_water)
    s_ma = Sinogram(get_projector(geo, workers).forward(mu.values), GridUnit.LINE_INTEGRAL)
    m_p = metal_mask_projection(mask, geo, workers)
    return IngestedCase(case_id=case_id, s_ma=s_ma, mask=mask, m_p=m_p, m_t=metal_trace(m_p), flags=flags)
