from __future__ import annotations

from dataclasses import dataclass, field

N_METAL_GROUPS = 5

REPORT_COLUMNS = ("case_id", "group", "psnr_db", "ssim", "sino_mse", "sino_mse_trace")


@dataclass(frozen=True)
class CaseMetrics:
    """Metrics of one candidate against its ground truth"""
    case_id: str
    group: int | None
    psnr_db: float
    ssim: float
    sino_mse: float
    sino_mse_trace: float


@dataclass(frozen=True)
class GroupAggregate:
    """Means over the cases in one metal-size group (or over all cases)"""
    label: str
    group: int | None
    n_cases: int
    psnr_db: float
    ssim: float
    sino_mse: float
    sino_mse_trace: float


@dataclass
class EvalReport:
    """Per-case metrics plus five metal-size groups (1 = largest metal) and the overall mean"""
    cases: list[CaseMetrics] = field(default_factory=list)
    groups: list[GroupAggregate] = field(default_factory=list)
    overall: GroupAggregate | None = None

    def group(self, index: int) -> GroupAggregate:
        return self.groups[index - 1]
