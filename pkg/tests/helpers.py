import numpy as np

from ctmar.core.coordinates import pixel_coordinates
from ctmar.models.enums import GridUnit
from ctmar.models.geometry import Geometry
from ctmar.models.grids import Image, MetalMask


def disk_mask(geo: Geometry, cx: float, cy: float, radius: float) -> MetalMask:
    x, y = pixel_coordinates(geo)
    return MetalMask.from_bool((x - cx) ** 2 + (y - cy) ** 2 <= radius**2)


def soft_tissue_disk(geo: Geometry, radius: float, hu: float = 0.0) -> Image:
    """HU image: a disk of the given value in air"""
    x, y = pixel_coordinates(geo)
    return Image(np.where(x**2 + y**2 <= radius**2, hu, -1000.0), GridUnit.HU)


def antialiased_disk(geo: Geometry, radius: float, oversample: int = 8) -> Image:
    """Unit-attenuation disk with fractional edge-pixel coverage"""
    x, y = pixel_coordinates(geo)
    offsets = ((np.arange(oversample) + 0.5) / oversample - 0.5) * geo.pixel_size
    coverage = np.zeros(geo.image_shape)
    for dy in offsets:
        for dx in offsets:
            coverage += (x + dx) ** 2 + (y + dy) ** 2 <= radius**2
    return Image(coverage / oversample**2, GridUnit.ATTENUATION)


def random_attenuation(geo: Geometry, rng: np.random.Generator) -> Image:
    return Image(rng.uniform(0.0, 0.04, geo.image_shape), GridUnit.ATTENUATION)
