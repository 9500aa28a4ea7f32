"""`ctmar ingest`: clinical HU slices -> S_ma, M, M_p, M_t in the simulation geometry."""
from __future__ import annotations

import argparse
from pathlib import Path

from ctmar.cli.commands.batch import exit_code, run_cases
from ctmar.io.case_store import ManifestEntry, list_grids, write_grids
from ctmar.io.grid_io import read_image
from ctmar.models.enums import CaseStatus
from ctmar.models.run_config import RunConfig
from ctmar.physics.clinical import clinical_ingest


def cmd_ingest(args: argparse.Namespace, config: RunConfig) -> int:
    out = Path(config.out or "ingested")

    def ingest_one(case_id: str, path: Path) -> ManifestEntry:
        case = clinical_ingest(read_image(path), config.geometry, config.ingest,
                               case_id=case_id, mu_water=config.simulation.mu_water)
        write_grids(case.grids(), out / case_id)
        return ManifestEntry(case_id=case_id, status=CaseStatus.COMPLETED, flags=[f.value for f in case.flags])

    items = list(list_grids(Path(args.images)).items())
    return exit_code(run_cases("ingest", items, ingest_one, config, out))
