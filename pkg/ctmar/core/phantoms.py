"""Synthetic images and metal masks for tests, regression bounds and the `synth` command.

All generators are deterministic for a given numpy Generator state.
"""
import math
from collections.abc import Sequence

import numpy as np
from scipy.ndimage import gaussian_filter
from skimage.data import shepp_logan_phantom
from skimage.transform import resize

from ctmar.core.coordinates import inscribed_circle, pixel_coordinates
from ctmar.models.enums import GridUnit
from ctmar.models.geometry import Geometry
from ctmar.models.grids import Image, MetalMask
from ctmar.settings import settings

AIR_HU = -1000.0


def shepp_logan(geo: Geometry, smooth_sigma: float = 2.0, scale: float = settings.mu_water) -> Image:
    """Smoothed Shepp-Logan phantom in attenuation units; the FBP round-trip regression phantom."""
    phantom = resize(shepp_logan_phantom(), geo.image_shape, mode="reflect", anti_aliasing=True)
    if smooth_sigma > 0:
        phantom = gaussian_filter(phantom, smooth_sigma)
    phantom = np.clip(phantom, 0.0, None) * scale
    phantom[~inscribed_circle(geo)] = 0.0
    return Image(phantom, GridUnit.ATTENUATION)


def gaussian_blobs(
    geo: Geometry,
    rng: np.random.Generator,
    n_blobs: int = 6,
    sigma_range: tuple[float, float] = (0.06, 0.14),
    scale: float = settings.mu_water,
) -> Image:
    """Sum of isotropic Gaussians well inside the reconstruction circle.

    sigma_range is a fraction of the field of view.
    """
    x, y = pixel_coordinates(geo)
    fov = geo.image_size * geo.pixel_size
    image = np.zeros(geo.image_shape)
    for _ in range(n_blobs):
        sigma = rng.uniform(*sigma_range) * fov
        reach = max(fov / 2.0 - 3.0 * sigma, 0.0)
        radius = reach * math.sqrt(rng.uniform())
        angle = rng.uniform(0.0, 2.0 * math.pi)
        cx, cy = radius * math.cos(angle), radius * math.sin(angle)
        amplitude = rng.uniform(0.3, 1.0) * scale
        image += amplitude * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2.0 * sigma**2))
    return Image(image, GridUnit.ATTENUATION)


def gaussian_blob_function(centres: Sequence[tuple[float, float, float, float]]):
    """Analytic sum of Gaussians (cx, cy, sigma, amplitude); evaluates at arbitrary (x, y)."""

    def evaluate(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x, dtype=np.float64)
        for cx, cy, sigma, amplitude in centres:
            out += amplitude * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2.0 * sigma**2))
        return out

    return evaluate


def _ellipse(x: np.ndarray, y: np.ndarray, cx: float, cy: float, a: float, b: float, phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    u = (x - cx) * c + (y - cy) * s
    v = -(x - cx) * s + (y - cy) * c
    return (u / a) ** 2 + (v / b) ** 2 <= 1.0


def body_phantom(geo: Geometry, rng: np.random.Generator) -> Image:
    """Random clean HU slice: a soft-tissue body with fat, organs, lungs and bone, air outside."""
    x, y = pixel_coordinates(geo)
    half = geo.image_size * geo.pixel_size / 2.0
    image = np.full(geo.image_shape, AIR_HU)

    a_body = rng.uniform(0.78, 0.90) * half
    b_body = rng.uniform(0.58, 0.72) * half
    body = _ellipse(x, y, 0.0, 0.0, a_body, b_body, 0.0)
    image[body] = -100.0  # subcutaneous fat
    inner = _ellipse(x, y, 0.0, 0.0, 0.88 * a_body, 0.86 * b_body, 0.0)
    image[inner] = rng.uniform(30.0, 50.0)

    for side in (-1.0, 1.0):
        if rng.uniform() < 0.5:
            lung = _ellipse(x, y, side * 0.42 * a_body, -0.1 * b_body, 0.28 * a_body, 0.45 * b_body, 0.0)
            image[lung & inner] = -820.0
    for _ in range(rng.integers(2, 5)):
        cx = rng.uniform(-0.5, 0.5) * a_body
        cy = rng.uniform(-0.4, 0.4) * b_body
        organ = _ellipse(x, y, cx, cy, rng.uniform(0.08, 0.22) * a_body, rng.uniform(0.08, 0.22) * b_body,
                         rng.uniform(0.0, math.pi))
        image[organ & inner] = rng.uniform(20.0, 80.0)

    spine_y = 0.62 * b_body
    vertebra = _ellipse(x, y, 0.0, spine_y, 0.12 * a_body, 0.16 * b_body, 0.0)
    image[vertebra] = rng.uniform(500.0, 900.0)
    canal = _ellipse(x, y, 0.0, spine_y - 0.05 * b_body, 0.035 * a_body, 0.04 * b_body, 0.0)
    image[canal] = 30.0
    for side in (-1.0, 1.0):
        rib = _ellipse(x, y, side * 0.8 * a_body, 0.2 * b_body, 0.035 * a_body, 0.06 * b_body, 0.3 * side)
        image[rib & body] = rng.uniform(400.0, 800.0)

    image = gaussian_filter(image, 0.6)
    return Image(image, GridUnit.HU)


def metal_mask(
    geo: Geometry,
    rng: np.random.Generator,
    target_pixels: float,
    max_implants: int = 2,
) -> MetalMask:
    """One or more elliptical implants totalling roughly target_pixels, placed in the central body region."""
    x, y = pixel_coordinates(geo)
    half = geo.image_size * geo.pixel_size / 2.0
    n_implants = int(rng.integers(1, max_implants + 1))
    area = max(target_pixels, 1.0) / n_implants * geo.pixel_size**2
    mask = np.zeros(geo.image_shape, dtype=bool)
    for _ in range(n_implants):
        aspect = rng.uniform(1.0, 2.5)
        b = math.sqrt(area / (math.pi * aspect))
        a = aspect * b
        reach = max(0.35 * half - a, 0.0)
        cx, cy = rng.uniform(-reach, reach), rng.uniform(-0.6 * reach, 0.6 * reach)
        mask |= _ellipse(x, y, cx, cy, a, b, rng.uniform(0.0, math.pi))
        if not mask.any():
            row = int(round(cy / geo.pixel_size + (geo.image_size - 1) / 2.0))
            col = int(round(cx / geo.pixel_size + (geo.image_size - 1) / 2.0))
            mask[row, col] = True
    return MetalMask.from_bool(mask)


def group_targets(thresholds: Sequence[int]) -> list[float]:
    """Representative pixel counts for groups 1..5 given the four ascending group thresholds"""
    t1, t2, t3, t4 = thresholds
    return [1.6 * t4, math.sqrt(t3 * t4), math.sqrt(t2 * t3), math.sqrt(t1 * t2), 0.5 * t1]
