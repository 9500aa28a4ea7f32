"""`ctmar simulate`: clean slices + metal masks -> full simulated case directories."""
from __future__ import annotations

import argparse
import logging
from pathlib import Path

from ctmar.cli.commands.batch import exit_code, run_cases
from ctmar.io.case_store import ManifestEntry, pair_inputs, write_grids
from ctmar.io.grid_io import read_image, read_mask
from ctmar.models.enums import CaseStatus
from ctmar.models.run_config import RunConfig
from ctmar.physics.simulation import PoissonNoise, simulate_case
from ctmar.physics.spectrum_loader import load_spectrum
from ctmar.projector.filters import RampFilter

logger = logging.getLogger(__name__)


def cmd_simulate(args: argparse.Namespace, config: RunConfig) -> int:
    pairs = pair_inputs(Path(args.images), Path(args.masks))
    out = Path(config.out or "simulated")
    geo = config.geometry
    sim = config.simulation
    spectrum = load_spectrum(sim.spectrum_path)
    spectrum.material(sim.material)
    filt = RampFilter.for_geometry(geo, config.filter.window)
    indices = {case_id: i for i, (case_id, _, _) in enumerate(pairs)}

    def simulate_one(case_id: str, paths: tuple[Path, Path]) -> ManifestEntry:
        image_path, mask_path = paths
        x_gt = read_image(image_path).require_geometry(geo, f"[case {case_id}] clean image")
        mask = read_mask(mask_path).require_geometry(geo, f"[case {case_id}] metal mask")
        noise = None
        if sim.noise is not None:
            noise = PoissonNoise(sim.noise.incident_photons, seed=config.seed * 1_000_003 + indices[case_id])
        case = simulate_case(
            x_gt,
            spectrum.insert(sim.material, mask),
            spectrum,
            geo,
            filt,
            case_id=case_id,
            mu_water=sim.mu_water,
            group_thresholds=sim.group_thresholds,
            trace_dilation=config.mar.trace_dilation,
            noise=noise,
        )
        write_grids(case.grids(), out / case_id)
        return ManifestEntry(case_id=case_id, status=CaseStatus.COMPLETED, group=case.metal_size_group)

    items = [(case_id, (image, mask)) for case_id, image, mask in pairs]
    manifest = run_cases("simulate", items, simulate_one, config, out)
    logger.info("Simulated %s case(s) into %s", len(manifest.cases) - len(manifest.failed), out)
    return exit_code(manifest)
