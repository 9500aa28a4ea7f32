import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ctmar.models.enums import BeamModel

FULL_TURN = 2.0 * math.pi
_TURN_TOLERANCE = 1e-9


class Geometry(BaseModel):
    """2D projection geometry shared by the projector, the simulator and the encoders.

    Lengths are in millimetres and angles in radians. The detector array is centred, so detector
    index (n_detectors - 1) / 2 passes through the rotation centre. For fan-beam geometries the
    fan angle spacing is detector_spacing / source_distance, i.e. the detector spacing is measured
    at the isocentre.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    n_angles: int = Field(default=640, ge=1)
    angle_range: float = Field(default=FULL_TURN, gt=0)
    angle_offset: float = 0.0
    n_detectors: int = Field(default=641, ge=1)
    detector_spacing: float = Field(default=1.0, gt=0)
    pixel_size: float = Field(default=1.0, gt=0)
    image_size: int = Field(default=416, ge=1)
    beam_model: BeamModel = BeamModel.PARALLEL
    source_distance: float | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _check_fan(self) -> "Geometry":
        if self.beam_model == BeamModel.FAN_EQUIANGULAR:
            if self.source_distance is None:
                raise ValueError("fan-beam geometry requires source_distance")
            half_diagonal = self.image_size * self.pixel_size / math.sqrt(2.0)
            if self.source_distance <= half_diagonal:
                raise ValueError(
                    f"source_distance {self.source_distance} must exceed the image half diagonal {half_diagonal:.3f}"
                )
            half_fan = 0.5 * (self.n_detectors - 1) * self.detector_spacing / self.source_distance
            if half_fan >= math.pi / 2:
                raise ValueError("fan angle must stay below 180 degrees")
        return self

    @classmethod
    def reference(cls) -> "Geometry":
        """416x416 images, 640 angles over a full turn, 641 rays"""
        return cls()

    @property
    def image_shape(self) -> tuple[int, int]:
        return (self.image_size, self.image_size)

    @property
    def sinogram_shape(self) -> tuple[int, int]:
        return (self.n_angles, self.n_detectors)

    @property
    def angle_step(self) -> float:
        return self.angle_range / self.n_angles

    @property
    def is_full_turn(self) -> bool:
        return abs(self.angle_range - FULL_TURN) < _TURN_TOLERANCE

    @property
    def is_half_turn(self) -> bool:
        return abs(self.angle_range - math.pi) < _TURN_TOLERANCE

    @property
    def fan_angle_step(self) -> float:
        if self.source_distance is None:
            raise ValueError("fan angle step is only defined for fan-beam geometries")
        return self.detector_spacing / self.source_distance

    def angles(self) -> np.ndarray:
        """Projection (or source) angles; endpoint excluded"""
        return self.angle_offset + self.angle_step * np.arange(self.n_angles, dtype=np.float64)

    def detector_positions(self) -> np.ndarray:
        """Detector centre offsets from the central ray, in detector-spacing units times spacing"""
        centre = (self.n_detectors - 1) / 2.0
        return (np.arange(self.n_detectors, dtype=np.float64) - centre) * self.detector_spacing

    def parallel_equivalent(self) -> "Geometry":
        """Parallel-beam geometry with the same sampling, used as the fan rebinning target"""
        return self.model_copy(update={"beam_model": BeamModel.PARALLEL, "source_distance": None})
