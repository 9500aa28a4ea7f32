"""`ctmar mar`: run LI or NMAR on every case directory."""
from __future__ import annotations

import argparse
import logging
from pathlib import Path

from ctmar.cli.commands.batch import exit_code, run_cases
from ctmar.io.case_store import ManifestEntry, list_case_dirs, read_case, write_grids
from ctmar.marbase.correction import correct_case
from ctmar.models.enums import CaseStatus
from ctmar.models.run_config import RunConfig
from ctmar.projector.filters import RampFilter

logger = logging.getLogger(__name__)


def cmd_mar(args: argparse.Namespace, config: RunConfig) -> int:
    cases_dir = Path(args.cases)
    out = Path(config.out) if config.out else cases_dir
    geo = config.geometry
    filt = RampFilter.for_geometry(geo, config.filter.window)
    thresholds = config.simulation.group_thresholds

    def correct_one(case_id: str, case_dir: Path) -> ManifestEntry:
        case = read_case(case_dir, thresholds)
        case.s_ma.require_geometry(geo, f"[case {case_id}] S_ma")
        result = correct_case(case, config.mar.method, geo, filt, config.mar, mu_water=config.simulation.mu_water)
        grids = {"S_corrected": result.s_corrected, "X_corrected": result.x_corrected}
        if result.prior is not None:
            grids["prior"] = result.prior.image
        write_grids(grids, out / case_id)
        flags = ["angle_fallback"] if result.fallback_rows else []
        return ManifestEntry(case_id=case_id, status=CaseStatus.COMPLETED,
                             group=getattr(case, "metal_size_group", None), flags=flags)

    items = [(d.name, d) for d in list_case_dirs(cases_dir)]
    manifest = run_cases(
        f"mar-{config.mar.method.value}", items, correct_one, config, out, f"manifest_mar_{config.mar.method.value}.json"
    )
    return exit_code(manifest)
