"""Training objective: sinogram L1 plus metal-masked image L1 terms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ctmar.models.grids import Image, MetalMask, Sinogram, require_same_shape
from ctmar.models.run_config import LossWeights


@dataclass(frozen=True)
class LossBreakdown:
    total: float
    sinogram: float
    radon_consistency: float
    image: float


def total_loss(
    s_se: Sinogram,
    s_gt: Sinogram,
    x_se: Image,
    x_out: Image,
    x_gt: Image,
    mask: MetalMask,
    weights: LossWeights = LossWeights(),
) -> LossBreakdown:
    """Weighted L1 terms. Image terms average over non-metal pixels only and are 0 when every pixel is metal.

    `weights` is usually the `loss` block of the run configuration.
    """
    require_same_shape("loss sinograms", s_se, s_gt)
    require_same_shape("loss images", x_se, x_out, x_gt, mask)

    sinogram = weights.alpha_se * float(np.mean(np.abs(s_se.values - s_gt.values)))
    keep = ~mask.as_bool()
    n_keep = int(np.count_nonzero(keep))
    if n_keep == 0:
        radon_consistency = image = 0.0
    else:
        radon_consistency = weights.alpha_rc * float(np.sum(np.abs(x_se.values - x_gt.values)[keep])) / n_keep
        image = weights.alpha_ie * float(np.sum(np.abs(x_out.values - x_gt.values)[keep])) / n_keep
    return LossBreakdown(sinogram + radon_consistency + image, sinogram, radon_consistency, image)
