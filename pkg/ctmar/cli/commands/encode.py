"""`ctmar encode`: M_p / M_t pooling pyramids and the padded S_ma for training harnesses."""
from __future__ import annotations

import argparse
from pathlib import Path

from ctmar.cli.commands.batch import exit_code, run_cases
from ctmar.encoding.padding import periodic_pad
from ctmar.encoding.pyramid import pool_pyramid, trace_pyramid
from ctmar.io.case_store import ManifestEntry, list_case_dirs, write_grids
from ctmar.io.grid_io import read_sinogram
from ctmar.models.enums import CaseStatus
from ctmar.models.run_config import RunConfig


def cmd_encode(args: argparse.Namespace, config: RunConfig) -> int:
    cases_dir = Path(args.cases)
    out = Path(config.out) if config.out else cases_dir
    enc = config.encoding
    geo = config.geometry

    def encode_one(case_id: str, case_dir: Path) -> ManifestEntry:
        m_p = read_sinogram(case_dir / "M_p").require_geometry(geo, f"[case {case_id}] M_p")
        m_t = read_sinogram(case_dir / "M_t").require_geometry(geo, f"[case {case_id}] M_t")
        s_ma = read_sinogram(case_dir / "S_ma")
        target = out / case_id
        pyramid = pool_pyramid(m_p, enc.pyramid_depth)
        write_grids({f"level_{k}": level for k, level in enumerate(pyramid.levels)}, target / "pyramid")
        traces = trace_pyramid(m_t, enc.pyramid_depth)
        write_grids({f"level_{k}": level for k, level in enumerate(traces.levels)}, target / "trace_pyramid")
        padded = periodic_pad(s_ma, enc.pad_angles, enc.pad_detectors, geo, enc.pad_mode)
        write_grids({"S_ma_padded": padded.sinogram}, target)
        return ManifestEntry(case_id=case_id, status=CaseStatus.COMPLETED)

    items = [(d.name, d) for d in list_case_dirs(cases_dir, required="M_p")]
    return exit_code(run_cases("encode", items, encode_one, config, out, "manifest_encode.json"))
