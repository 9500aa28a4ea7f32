"""`ctmar eval`: score candidate grids against simulated ground truth."""
from __future__ import annotations

import argparse
import logging
from pathlib import Path

from rich.console import Console
from skimage.io import imsave

from ctmar.errors import UnpairedInputsError
from ctmar.io.case_store import list_case_dirs, read_sim_case
from ctmar.io.grid_io import grid_exists, read_image, read_sinogram
from ctmar.metrics.evaluation import EvalCase, evaluate_dataset, render_report, write_report_csv
from ctmar.metrics.image_quality import preview_bytes
from ctmar.models.run_config import RunConfig

logger = logging.getLogger(__name__)

console = Console()


def cmd_eval(args: argparse.Namespace, config: RunConfig) -> int:
    truth_dir = Path(args.truth)
    candidate_dir = Path(args.candidates) if args.candidates else truth_dir
    out = Path(config.out or "eval")
    thresholds = config.simulation.group_thresholds

    case_dirs = list_case_dirs(truth_dir, required="X_gt")
    missing = [
        d.name
        for d in case_dirs
        if not (grid_exists(candidate_dir / d.name / args.candidate_image)
                and grid_exists(candidate_dir / d.name / args.candidate_sino))
    ]
    if not case_dirs or missing:
        raise UnpairedInputsError(
            f"{len(missing)} case(s) lack {args.candidate_image}/{args.candidate_sino} in {candidate_dir}"
            if case_dirs else f"no simulated cases found in {truth_dir}",
            missing,
        )

    def load(case_dir: Path) -> EvalCase:
        case = read_sim_case(case_dir, thresholds)
        source = candidate_dir / case.case_id
        return EvalCase(case, read_image(source / args.candidate_image), read_sinogram(source / args.candidate_sino))

    items = [load(d) for d in case_dirs]
    report = evaluate_dataset(items, config.workers)

    previews = out / "previews"
    previews.mkdir(parents=True, exist_ok=True)
    for item in items:
        imsave(previews / f"{item.case.case_id}.png", preview_bytes(item.x_candidate), check_contrast=False)

    path = write_report_csv(report, out / "report.csv")
    render_report(report, console, title=f"{args.candidate_image} vs X_gt ({len(items)} cases)")
    logger.info("Wrote %s", path)
    return 0
