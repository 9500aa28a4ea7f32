from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ctmar.errors import InvalidInputError
from ctmar.models.enums import IngestFlag, PriorProvenance
from ctmar.models.grids import Image, MetalMask, Sinogram, require_same_shape

# M_p entries with magnitude below this are treated as zero when forming the metal trace
TRACE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class SimCase:
    """One simulated case: ground truth, corrupted data and network inputs"""
    case_id: str
    x_gt: Image
    mask: MetalMask
    s_gt: Sinogram
    s_ma: Sinogram
    x_ma: Image
    m_p: Sinogram
    m_t: Sinogram
    s_li: Sinogram
    metal_size_group: int | None  # None when the mask is empty

    def __post_init__(self) -> None:
        require_same_shape(f"[case {self.case_id}] image grids", self.x_gt, self.mask, self.x_ma)
        require_same_shape(f"[case {self.case_id}] sinogram grids", self.s_gt, self.s_ma, self.m_p, self.m_t, self.s_li)
        if not np.array_equal(self.m_t.values, (self.m_p.values > TRACE_TOLERANCE).astype(np.float64)):
            raise InvalidInputError(f"[case {self.case_id}] metal trace is not the indicator of M_p > 0")
        if self.metal_size_group is not None and not 1 <= self.metal_size_group <= 5:
            raise InvalidInputError(f"[case {self.case_id}] metal size group must be in 1..5")

    def grids(self) -> dict[str, Image | Sinogram | MetalMask]:
        """Grids in their on-disk names"""
        return {
            "X_gt": self.x_gt,
            "M": self.mask,
            "S_gt": self.s_gt,
            "S_ma": self.s_ma,
            "X_ma": self.x_ma,
            "M_p": self.m_p,
            "M_t": self.m_t,
            "S_LI": self.s_li,
        }


@dataclass(frozen=True, eq=False)
class IngestedCase:
    """A clinical slice processed into the simulation geometry; it has no ground truth"""
    case_id: str
    s_ma: Sinogram
    mask: MetalMask
    m_p: Sinogram
    m_t: Sinogram
    flags: list[IngestFlag] = field(default_factory=list)

    def grids(self) -> dict[str, Image | Sinogram | MetalMask]:
        return {
            "S_ma": self.s_ma,
            "M": self.mask,
            "M_p": self.m_p,
            "M_t": self.m_t,
        }


@dataclass(frozen=True, eq=False)
class PriorImage:
    """NMAR prior: piecewise-constant tissue image, strictly positive everywhere"""
    image: Image
    provenance: PriorProvenance = PriorProvenance.THRESHOLD_SEGMENTED

    def __post_init__(self) -> None:
        if np.any(self.image.values <= 0):
            raise InvalidInputError("prior image must be strictly positive")


@dataclass(frozen=True, eq=False)
class InpaintResult:
    """Inpainted sinogram plus the angle rows that needed the angle-axis fallback"""
    sinogram: Sinogram
    fallback_rows: list[int] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class MarResult:
    """Output of one classical MAR baseline on one case"""
    case_id: str
    s_corrected: Sinogram
    x_corrected: Image
    prior: PriorImage | None = None
    fallback_rows: list[int] = field(default_factory=list)
