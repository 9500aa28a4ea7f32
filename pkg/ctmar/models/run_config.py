"""Per-run configuration: defaults < config file < CLI flags."""
import hashlib

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ctmar.models.enums import FilterWindow, MarMethod, PadMode, PriorSource
from ctmar.models.geometry import Geometry
from ctmar.settings import settings

# Pixel-count cut points between the five metal-size groups at the default 416x416 geometry
DEFAULT_GROUP_THRESHOLDS = (60, 200, 500, 1200)


class _Block(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class NoiseConfig(_Block):
    """Poisson photon noise on S_ma; off unless configured"""
    incident_photons: float = Field(default=2e7, gt=0)


class SimulationConfig(_Block):
    spectrum_path: str | None = None
    material: str = "titanium"
    mu_water: float = Field(default=settings.mu_water, gt=0)
    group_thresholds: tuple[int, int, int, int] = DEFAULT_GROUP_THRESHOLDS
    noise: NoiseConfig | None = None

    @field_validator("group_thresholds")
    @classmethod
    def _ascending(cls, value: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("group_thresholds must be strictly ascending")
        return value


class FilterConfig(_Block):
    window: FilterWindow = FilterWindow.RAMP


class MarConfig(_Block):
    method: MarMethod = MarMethod.LI
    trace_dilation: int = Field(default=1, ge=0)
    air_hu: float = -500.0
    bone_hu: float = 350.0
    bone_mu_factor: float = Field(default=2.0, gt=0)
    smooth_sigma: float = Field(default=1.0, ge=0)
    metal_hu: float = 2500.0
    prior_source: PriorSource = PriorSource.LI

    @model_validator(mode="after")
    def _cutpoints(self) -> "MarConfig":
        if not self.air_hu < self.bone_hu:
            raise ValueError("NMAR cutpoints must satisfy air_hu < bone_hu")
        return self


class EncodingConfig(_Block):
    pad_angles: int = Field(default=8, ge=0)
    pad_detectors: int = Field(default=8, ge=0)
    pad_mode: PadMode = PadMode.PERIODIC
    pyramid_depth: int = Field(default=4, ge=1)


class LossWeights(_Block):
    alpha_se: float = Field(default=1.0, ge=0)
    alpha_rc: float = Field(default=1.0, ge=0)
    alpha_ie: float = Field(default=1.0, ge=0)


class IngestConfig(_Block):
    metal_hu_threshold: float = 2500.0
    selection_hu: float = 3000.0
    selection_min_pixels: int = Field(default=100, ge=0)


class SynthConfig(_Block):
    n_cases: int = Field(default=50, ge=1)


class RunConfig(BaseModel):
    """Everything a batch run depends on; its hash is recorded in run manifests"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    geometry: Geometry = Geometry()
    simulation: SimulationConfig = SimulationConfig()
    filter: FilterConfig = FilterConfig()
    mar: MarConfig = MarConfig()
    encoding: EncodingConfig = EncodingConfig()
    loss: LossWeights = LossWeights()
    ingest: IngestConfig = IngestConfig()
    synth: SynthConfig = SynthConfig()
    out: str | None = None
    workers: int = Field(default=settings.workers, ge=1)
    seed: int = 0

    def config_hash(self) -> str:
        """SHA-256 of the effective configuration, excluding output location and worker count"""
        payload = self.model_dump_json(exclude={"out", "workers"})
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()
