import numpy as np

from ctmar.models.geometry import Geometry


def pixel_coordinates(geo: Geometry) -> tuple[np.ndarray, np.ndarray]:
    """Physical (x, y) of every pixel centre; x runs along columns, y along rows, origin at the rotation centre."""
    centre = (geo.image_size - 1) / 2.0
    axis = (np.arange(geo.image_size, dtype=np.float64) - centre) * geo.pixel_size
    y, x = np.meshgrid(axis, axis, indexing="ij")
    return x, y


def inscribed_circle(geo: Geometry) -> np.ndarray:
    """Boolean mask of pixels inside the circle inscribed in the image square"""
    x, y = pixel_coordinates(geo)
    radius = geo.image_size * geo.pixel_size / 2.0
    return x**2 + y**2 <= radius**2
