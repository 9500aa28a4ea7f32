from collections.abc import Sequence

import numpy as np

from ctmar.errors import InvalidInputError, NoMetalError
from ctmar.models.grids import MetalMask

N_GROUPS = 5


def metal_size_group(mask: MetalMask, thresholds: Sequence[int]) -> int:
    """Metal-size group of a mask: 1 = largest metal, 5 = smallest.

    A pixel count equal to a threshold falls on the smaller-metal side.
    """
    if len(thresholds) != N_GROUPS - 1:
        raise InvalidInputError(f"expected {N_GROUPS - 1} thresholds, got {len(thresholds)}")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise InvalidInputError(f"thresholds must be strictly ascending: {list(thresholds)}")
    count = mask.pixel_count
    if count == 0:
        raise NoMetalError("metal mask is empty; no metal-size group applies")
    below = int(np.searchsorted(np.asarray(thresholds), count, side="left"))
    return N_GROUPS - below
