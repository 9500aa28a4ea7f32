"""Case directories, input pairing and run manifests.

A case lives in `<root>/<case_id>/` with one raw+JSON pair per grid, named as in SimCase.grids().
"""
from __future__ import annotations

import logging
import threading
from collections.abc import Sequence
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

from ctmar.core.grouping import metal_size_group
from ctmar.errors import GridFormatError, NoMetalError, UnpairedInputsError
from ctmar.io.grid_io import SIDECAR_SUFFIX, grid_exists, read_image, read_mask, read_sinogram, write_grid
from ctmar.models.case import IngestedCase, SimCase
from ctmar.models.enums import CaseStatus
from ctmar.models.grids import Grid
from ctmar.settings import settings

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def list_grids(directory: Path) -> dict[str, Path]:
    """Grid basenames in a directory (sidecar and raw both present), sorted"""
    if not directory.is_dir():
        raise GridFormatError(f"not a directory: {directory}")
    found: dict[str, Path] = {}
    for sidecar in sorted(directory.glob(f"*{SIDECAR_SUFFIX}")):
        base = sidecar.with_suffix("")
        if grid_exists(base):
            found[base.name] = base
    return found


def pair_inputs(image_dir: Path, mask_dir: Path) -> list[tuple[str, Path, Path]]:
    """Pair clean images with masks by basename; any unpaired name is an error"""
    images = list_grids(image_dir)
    masks = list_grids(mask_dir)
    unpaired = sorted(set(images).symmetric_difference(masks))
    if unpaired:
        raise UnpairedInputsError(
            f"{len(unpaired)} input(s) have no counterpart: {', '.join(unpaired)}", unpaired
        )
    return [(name, images[name], masks[name]) for name in sorted(images)]


def list_case_dirs(root: Path, required: str = "S_ma") -> list[Path]:
    """Case directories under root that contain the required grid, sorted by case id"""
    if not root.is_dir():
        raise GridFormatError(f"not a directory: {root}")
    return [p for p in sorted(root.iterdir()) if p.is_dir() and grid_exists(p / required)]


def write_grids(grids: dict[str, Grid], case_dir: Path) -> None:
    for name, grid in grids.items():
        write_grid(grid, case_dir / name)


def read_sim_case(case_dir: Path, thresholds: Sequence[int]) -> SimCase:
    """Load a simulated case; the metal-size group is recomputed from the stored mask"""
    mask = read_mask(case_dir / "M")
    try:
        group = metal_size_group(mask, thresholds)
    except NoMetalError:
        group = None
    return SimCase(
        case_id=case_dir.name,
        x_gt=read_image(case_dir / "X_gt"),
        mask=mask,
        s_gt=read_sinogram(case_dir / "S_gt"),
        s_ma=read_sinogram(case_dir / "S_ma"),
        x_ma=read_image(case_dir / "X_ma"),
        m_p=read_sinogram(case_dir / "M_p"),
        m_t=read_sinogram(case_dir / "M_t"),
        s_li=read_sinogram(case_dir / "S_LI"),
        metal_size_group=group,
    )


class ManifestEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    case_id: str
    status: CaseStatus
    group: int | None = None
    flags: list[str] = Field(default_factory=list)
    error: str | None = None


class RunManifest(BaseModel):
    """What a batch command produced; contains no timestamps so reruns are byte-identical"""
    command: str
    app_version: str = settings.app_version
    config_hash: str
    config: dict
    cases: list[ManifestEntry] = Field(default_factory=list)

    @property
    def failed(self) -> list[ManifestEntry]:
        return [c for c in self.cases if c.status == CaseStatus.FAILED]


class ManifestWriter:
    """Collects per-case entries from worker threads and writes one sorted manifest"""

    def __init__(self, command: str, config_hash: str, config: dict) -> None:
        self._lock = threading.Lock()
        self._entries: dict[str, ManifestEntry] = {}
        self._command = command
        self._config_hash = config_hash
        self._config = config

    def record(self, entry: ManifestEntry) -> None:
        with self._lock:
            self._entries[entry.case_id] = entry

    def manifest(self) -> RunManifest:
        with self._lock:
            cases = [self._entries[k] for k in sorted(self._entries)]
        return RunManifest(command=self._command, config_hash=self._config_hash, config=self._config, cases=cases)

    def write(self, out_dir: Path, name: str = MANIFEST_NAME) -> RunManifest:
        manifest = self.manifest()
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / name
        path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info("Wrote manifest with %s case(s) to %s", len(manifest.cases), path)
        return manifest


def read_ingested_case(case_dir: Path) -> IngestedCase:
    return IngestedCase(
        case_id=case_dir.name,
        s_ma=read_sinogram(case_dir / "S_ma"),
        mask=read_mask(case_dir / "M"),
        m_p=read_sinogram(case_dir / "M_p"),
        m_t=read_sinogram(case_dir / "M_t"),
    )


def read_case(case_dir: Path, thresholds: Sequence[int]) -> SimCase | IngestedCase:
    """A simulated case when ground truth is present, else an ingested one"""
    if grid_exists(case_dir / "X_gt"):
        return read_sim_case(case_dir, thresholds)
    return read_ingested_case(case_dir)
