"""Dataset evaluation grouped by metal size, CSV export and the console summary."""
from __future__ import annotations

import csv
import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from ctmar.errors import InvalidInputError
from ctmar.metrics.image_quality import psnr, sino_mse, ssim
from ctmar.models.case import SimCase
from ctmar.models.grids import Image, Sinogram
from ctmar.models.report import N_METAL_GROUPS, REPORT_COLUMNS, CaseMetrics, EvalReport, GroupAggregate

logger = logging.getLogger(__name__)

_METRIC_FIELDS = ("psnr_db", "ssim", "sino_mse", "sino_mse_trace")


@dataclass(frozen=True, eq=False)
class EvalCase:
    """A simulated case with the candidate image and sinogram to score against its ground truth"""
    case: SimCase
    x_candidate: Image
    s_candidate: Sinogram


def case_metrics(item: EvalCase) -> CaseMetrics:
    case = item.case
    return CaseMetrics(
        case_id=case.case_id,
        group=case.metal_size_group,
        psnr_db=psnr(item.x_candidate, case.x_gt),
        ssim=ssim(item.x_candidate, case.x_gt),
        sino_mse=sino_mse(item.s_candidate, case.s_gt),
        sino_mse_trace=sino_mse(item.s_candidate, case.s_gt, case.m_t),
    )


def aggregate(label: str, group: int | None, cases: Sequence[CaseMetrics]) -> GroupAggregate:
    """Means over the given cases; NaN when there are none"""
    if not cases:
        return GroupAggregate(label, group, 0, math.nan, math.nan, math.nan, math.nan)
    means = {f: float(np.mean([getattr(c, f) for c in cases])) for f in _METRIC_FIELDS}
    return GroupAggregate(label, group, len(cases), **means)


def build_report(cases: Sequence[CaseMetrics]) -> EvalReport:
    cases = sorted(cases, key=lambda c: c.case_id)
    groups = [
        aggregate(f"group_{g}", g, [c for c in cases if c.group == g]) for g in range(1, N_METAL_GROUPS + 1)
    ]
    return EvalReport(cases=list(cases), groups=groups, overall=aggregate("overall", None, cases))


def evaluate_dataset(items: Sequence[EvalCase], workers: int = 1) -> EvalReport:
    """Per-case metrics in parallel, then five metal-size groups and the overall mean"""
    if not items:
        raise InvalidInputError("cannot evaluate an empty dataset")
    if workers <= 1:
        metrics = [case_metrics(item) for item in items]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            metrics = list(pool.map(case_metrics, items))
    for m in metrics:
        if m.group is None:
            logger.warning("[case %s] has no metal-size group; counted in the overall mean only", m.case_id)
    return build_report(metrics)


def _fmt(value: float) -> str:
    return "" if math.isnan(value) else format(value, ".8g")


def write_report_csv(report: EvalReport, path: Path) -> Path:
    """One row per case, then group_1..group_5 and overall"""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for c in report.cases:
            writer.writerow([c.case_id, "" if c.group is None else c.group,
                             *(_fmt(getattr(c, f)) for f in _METRIC_FIELDS)])
        for agg in [*report.groups, report.overall]:
            if agg is None:
                continue
            writer.writerow([agg.label, "" if agg.group is None else agg.group,
                             *(_fmt(getattr(agg, f)) for f in _METRIC_FIELDS)])
    return path


def render_report(report: EvalReport, console: Console | None = None, title: str = "Evaluation") -> Table:
    """Console table laid out Large Metal -> Small Metal, then Average"""
    tbl = Table(box=box.SIMPLE, show_header=True, header_style="bold cyan", padding=(0, 1),
                caption="Large Metal → Small Metal")
    tbl.add_column("metric", style="bold")
    for agg in report.groups:
        tbl.add_column(f"G{agg.group} (n={agg.n_cases})", justify="right")
    tbl.add_column("Average", justify="right")

    rows = (("PSNR (dB)", "psnr_db", ".2f"), ("SSIM (%)", "ssim", ".1%"),
            ("MSE", "sino_mse", ".3e"), ("MSE (trace)", "sino_mse_trace", ".3e"))
    aggregates = [*report.groups, report.overall]
    for name, field, spec in rows:
        cells = []
        for agg in aggregates:
            value = math.nan if agg is None else getattr(agg, field)
            cells.append("-" if math.isnan(value) else format(value, spec))
        tbl.add_row(name, *cells)

    if console is not None:
        console.print(Panel(tbl, title=f"[bold]{title}[/bold]", border_style="blue"))
    return tbl
