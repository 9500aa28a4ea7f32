"""Spectrum/material JSON files.

The file stores published units (cm²/g, g/cm³); the loader converts them to the
millimetre frame used by Geometry.
"""
from __future__ import annotations

import logging
from importlib import resources
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ctmar.errors import SpectrumError
from ctmar.models.spectrum import Material, Spectrum
from ctmar.settings import settings

logger = logging.getLogger(__name__)

DEFAULT_SPECTRUM = "default_spectrum.json"
CM2_TO_MM2 = 100.0
G_PER_CM3_TO_G_PER_MM3 = 1e-3


class MaterialEntry(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    mass_attenuation: list[float] = Field(alias="lambda", description="cm^2/g per energy bin")
    density: float = Field(alias="rho", gt=0, description="g/cm^3")


class SpectrumFile(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    description: str | None = None
    energies_kev: list[float] = Field(alias="energies_keV", min_length=1)
    weights: list[float]
    materials: dict[str, MaterialEntry] = Field(default_factory=dict)

    def to_spectrum(self) -> Spectrum:
        materials = {
            name: Material(
                name=name,
                mass_attenuation=tuple(v * CM2_TO_MM2 for v in entry.mass_attenuation),
                density=entry.density * G_PER_CM3_TO_G_PER_MM3,
            )
            for name, entry in self.materials.items()
        }
        return Spectrum(tuple(self.energies_kev), tuple(self.weights), materials)


def _read_text(path: str | Path | None) -> tuple[str, str]:
    path = path if path is not None else settings.spectrum_path
    if path is None:
        source = resources.files("ctmar.physics.data").joinpath(DEFAULT_SPECTRUM)
        return source.read_text(encoding="utf-8"), f"bundled {DEFAULT_SPECTRUM}"
    try:
        return Path(path).read_text(encoding="utf-8"), str(path)
    except OSError as exc:
        raise SpectrumError(f"cannot read spectrum file {path}: {exc}") from exc


def load_spectrum(path: str | Path | None = None) -> Spectrum:
    """Read and validate a spectrum file; the bundled default when no path is configured"""
    text, origin = _read_text(path)
    try:
        parsed = SpectrumFile.model_validate_json(text)
    except ValidationError as exc:
        raise SpectrumError(f"invalid spectrum file {origin}: {exc}") from exc
    spectrum = parsed.to_spectrum().require_normalized()
    logger.debug("Loaded spectrum from %s: %s bins, materials %s",
                 origin, len(spectrum.energies_kev), sorted(spectrum.materials))
    return spectrum
