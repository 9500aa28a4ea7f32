from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ctmar.errors import SpectrumError
from ctmar.models.grids import MetalMask

WEIGHT_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Material:
    """Mass attenuation table of one material on the spectrum's energy grid.

    Units follow the millimetre frame of Geometry: mass_attenuation in mm²/g, density in g/mm³,
    so mass_attenuation * density is a linear attenuation in 1/mm.
    """
    name: str
    mass_attenuation: tuple[float, ...]
    density: float

    def __post_init__(self) -> None:
        if self.density <= 0:
            raise SpectrumError(f"material '{self.name}': density must be positive")
        if any(value <= 0 for value in self.mass_attenuation):
            raise SpectrumError(f"material '{self.name}': mass attenuation must be strictly positive")


@dataclass(frozen=True)
class Spectrum:
    """Discrete polychromatic spectrum with fractional weights η(E) and a material table"""
    energies_kev: tuple[float, ...]
    weights: tuple[float, ...]
    materials: dict[str, Material] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.energies_kev:
            raise SpectrumError("spectrum has no energy bins")
        if len(self.weights) != len(self.energies_kev):
            raise SpectrumError(
                f"spectrum has {len(self.energies_kev)} energies but {len(self.weights)} weights"
            )
        energies = np.asarray(self.energies_kev)
        if np.any(np.diff(energies) <= 0):
            raise SpectrumError("spectrum energies must be strictly increasing")
        if any(w < 0 for w in self.weights):
            raise SpectrumError("spectrum weights must be nonnegative")
        for material in self.materials.values():
            if len(material.mass_attenuation) != len(self.energies_kev):
                raise SpectrumError(
                    f"material '{material.name}' has {len(material.mass_attenuation)} attenuation samples "
                    f"for {len(self.energies_kev)} energies"
                )

    @classmethod
    def monochromatic(cls, energy_kev: float, material: Material | None = None) -> Spectrum:
        materials = {material.name: material} if material else {}
        return cls((energy_kev,), (1.0,), materials)

    @property
    def weight_sum(self) -> float:
        return float(np.sum(self.weights))

    @property
    def is_normalized(self) -> bool:
        return abs(self.weight_sum - 1.0) <= WEIGHT_SUM_TOLERANCE

    def require_normalized(self) -> Spectrum:
        if not self.is_normalized:
            raise SpectrumError(f"spectrum weights sum to {self.weight_sum!r}, expected 1 within {WEIGHT_SUM_TOLERANCE}")
        return self

    def weights_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.float64)

    def material(self, name: str) -> Material:
        try:
            return self.materials[name]
        except KeyError:
            known = ", ".join(sorted(self.materials)) or "(none)"
            raise SpectrumError(f"unknown material '{name}'; known materials: {known}") from None

    def effective_attenuation(self, material: str) -> float:
        """Spectrum-weighted linear attenuation Σ η(E)λ(E)ρ in 1/mm"""
        m = self.material(material)
        return float(np.dot(self.weights_array(), np.asarray(m.mass_attenuation)) * m.density)

    def insert(self, material: str, mask: MetalMask) -> MetalInsert:
        m = self.material(material)
        return MetalInsert(
            mask=mask,
            material=m.name,
            rho_m=m.density,
            lambda_table=np.asarray(m.mass_attenuation, dtype=np.float64),
            energies_kev=self.energies_kev,
        )


@dataclass(frozen=True, eq=False)
class MetalInsert:
    """A metal implant: its mask, density and mass attenuation on a spectrum energy grid"""
    mask: MetalMask
    material: str
    rho_m: float
    lambda_table: np.ndarray
    energies_kev: tuple[float, ...]

    def __post_init__(self) -> None:
        table = np.array(self.lambda_table, dtype=np.float64)
        if self.rho_m <= 0:
            raise SpectrumError(f"insert '{self.material}': rho_m must be positive")
        if table.ndim != 1 or np.any(table <= 0):
            raise SpectrumError(f"insert '{self.material}': lambda_table must be a strictly positive vector")
        if table.shape[0] != len(self.energies_kev):
            raise SpectrumError(f"insert '{self.material}': lambda_table does not match its energy grid")
        table.setflags(write=False)
        object.__setattr__(self, "lambda_table", table)

    def require_energy_grid(self, spectrum: Spectrum) -> MetalInsert:
        if tuple(self.energies_kev) != tuple(spectrum.energies_kev):
            raise SpectrumError(f"insert '{self.material}' energy grid differs from the spectrum's")
        return self

    def linear_attenuation(self) -> np.ndarray:
        """λ_m(E)·ρ_m per energy bin, in 1/mm"""
        return self.lambda_table * self.rho_m
