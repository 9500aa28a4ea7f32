"""Immutable 2D grids: images, sinograms, metal masks and metal traces."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ctmar.errors import DimensionMismatchError, InvalidInputError, UnitMismatchError
from ctmar.models.enums import GridKind, GridUnit
from ctmar.models.geometry import Geometry

_IMAGE_UNITS = {GridUnit.HU, GridUnit.ATTENUATION, GridUnit.NORMALIZED}
_SINOGRAM_UNITS = {GridUnit.LINE_INTEGRAL, GridUnit.DIMENSIONLESS, GridUnit.BINARY}


def _frozen_array(values: np.ndarray | list, what: str) -> np.ndarray:
    array = np.array(values, dtype=np.float64)
    if array.ndim != 2:
        raise InvalidInputError(f"{what} must be a 2D grid, got {array.ndim} dimension(s)")
    if not np.all(np.isfinite(array)):
        raise InvalidInputError(f"{what} contains non-finite values")
    array.setflags(write=False)
    return array


def _check_binary(array: np.ndarray, what: str) -> None:
    if not np.all((array == 0.0) | (array == 1.0)):
        raise InvalidInputError(f"{what} must contain only 0.0 and 1.0")


@dataclass(frozen=True, eq=False)
class Image:
    """Dense 2D image in HU, attenuation per mm, or windowed [0, 1] units"""
    values: np.ndarray
    unit: GridUnit

    def __post_init__(self) -> None:
        if self.unit not in _IMAGE_UNITS:
            raise UnitMismatchError("image", "HU|attenuation|normalized", self.unit.value)
        object.__setattr__(self, "values", _frozen_array(self.values, "image"))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape  # type: ignore[return-value]

    @property
    def kind(self) -> GridKind:
        return GridKind.IMAGE

    def require_unit(self, unit: GridUnit, what: str = "image") -> Image:
        if self.unit != unit:
            raise UnitMismatchError(what, unit.value, self.unit.value)
        return self

    def require_geometry(self, geo: Geometry, what: str = "image") -> Image:
        if self.shape != geo.image_shape:
            raise DimensionMismatchError(what, geo.image_shape, self.shape)
        return self

    def with_values(self, values: np.ndarray, unit: GridUnit | None = None) -> Image:
        return Image(values, unit or self.unit)


@dataclass(frozen=True, eq=False)
class Sinogram:
    """Dense (n_angles, n_detectors) grid of line integrals or derived sinogram quantities"""
    values: np.ndarray
    unit: GridUnit = GridUnit.LINE_INTEGRAL

    def __post_init__(self) -> None:
        if self.unit not in _SINOGRAM_UNITS:
            raise UnitMismatchError("sinogram", "line_integral|dimensionless|binary", self.unit.value)
        array = _frozen_array(self.values, "sinogram")
        if self.unit == GridUnit.BINARY:
            _check_binary(array, "binary sinogram")
        object.__setattr__(self, "values", array)

    @property
    def n_angles(self) -> int:
        return self.values.shape[0]

    @property
    def n_detectors(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape  # type: ignore[return-value]

    @property
    def kind(self) -> GridKind:
        return GridKind.TRACE if self.unit == GridUnit.BINARY else GridKind.SINOGRAM

    def require_geometry(self, geo: Geometry, what: str = "sinogram") -> Sinogram:
        if self.shape != geo.sinogram_shape:
            raise DimensionMismatchError(what, geo.sinogram_shape, self.shape)
        return self

    def require_shape(self, shape: tuple[int, int], what: str = "sinogram") -> Sinogram:
        if self.shape != shape:
            raise DimensionMismatchError(what, shape, self.shape)
        return self

    def with_values(self, values: np.ndarray, unit: GridUnit | None = None) -> Sinogram:
        return Sinogram(values, unit or self.unit)

    def support(self) -> np.ndarray:
        """Boolean view of nonzero entries (for binary traces)"""
        return self.values != 0.0


@dataclass(frozen=True, eq=False)
class MetalMask:
    """Binary image-domain metal mask"""
    values: np.ndarray

    def __post_init__(self) -> None:
        array = _frozen_array(self.values, "metal mask")
        _check_binary(array, "metal mask")
        object.__setattr__(self, "values", array)

    @classmethod
    def from_bool(cls, mask: np.ndarray) -> MetalMask:
        return cls(np.asarray(mask, dtype=bool).astype(np.float64))

    @classmethod
    def empty(cls, geo: Geometry) -> MetalMask:
        return cls(np.zeros(geo.image_shape))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape  # type: ignore[return-value]

    @property
    def kind(self) -> GridKind:
        return GridKind.MASK

    @property
    def unit(self) -> GridUnit:
        return GridUnit.BINARY

    @property
    def pixel_count(self) -> int:
        return int(np.count_nonzero(self.values))

    @property
    def is_empty(self) -> bool:
        return self.pixel_count == 0

    def as_bool(self) -> np.ndarray:
        return self.values != 0.0

    def require_geometry(self, geo: Geometry, what: str = "metal mask") -> MetalMask:
        if self.shape != geo.image_shape:
            raise DimensionMismatchError(what, geo.image_shape, self.shape)
        return self

    def as_attenuation_image(self) -> Image:
        return Image(self.values, GridUnit.ATTENUATION)


Grid = Image | Sinogram | MetalMask


def require_same_shape(what: str, *grids: Grid) -> tuple[int, int]:
    """Return the common shape of the given grids, raising on any mismatch"""
    shape = grids[0].shape
    for grid in grids[1:]:
        if grid.shape != shape:
            raise DimensionMismatchError(what, shape, grid.shape)
    return shape
