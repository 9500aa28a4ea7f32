"""Linear Hounsfield scale: water at 0 HU, air at -1000 HU."""
import numpy as np

from ctmar.errors import InvalidInputError
from ctmar.models.enums import GridUnit
from ctmar.models.grids import Image
from ctmar.settings import settings


def _check_mu_water(mu_water: float) -> None:
    if not mu_water > 0:
        raise InvalidInputError(f"mu_water must be positive, got {mu_water}")


def hu_to_mu(img: Image, mu_water: float = settings.mu_water) -> Image:
    """HU image to linear attenuation per mm, clamped below at 0."""
    img.require_unit(GridUnit.HU, "hu_to_mu input")
    _check_mu_water(mu_water)
    mu = mu_water * (1.0 + img.values / 1000.0)
    return Image(np.maximum(mu, 0.0), GridUnit.ATTENUATION)


def mu_to_hu(img: Image, mu_water: float = settings.mu_water) -> Image:
    """Attenuation per mm to HU; inverse of hu_to_mu above -1000 HU."""
    img.require_unit(GridUnit.ATTENUATION, "mu_to_hu input")
    _check_mu_water(mu_water)
    return Image(1000.0 * (img.values / mu_water - 1.0), GridUnit.HU)
