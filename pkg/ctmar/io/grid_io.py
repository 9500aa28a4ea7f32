"""Raw+JSON grid format: little-endian float32 row-major values next to a JSON sidecar.

`<name>.raw` holds width*height float32 values, `<name>.json` holds
{"width", "height", "unit", "kind"}. Reads always return float64 grids.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ctmar.errors import GridFormatError
from ctmar.models.enums import GridKind, GridUnit
from ctmar.models.grids import Grid, Image, MetalMask, Sinogram

RAW_DTYPE = np.dtype("<f4")
RAW_SUFFIX = ".raw"
SIDECAR_SUFFIX = ".json"


def grid_paths(base: Path) -> tuple[Path, Path]:
    """Raw and sidecar paths for a grid basename (any suffix on base is ignored)"""
    stem = base.with_suffix("") if base.suffix in (RAW_SUFFIX, SIDECAR_SUFFIX) else base
    return stem.with_name(stem.name + RAW_SUFFIX), stem.with_name(stem.name + SIDECAR_SUFFIX)


def grid_exists(base: Path) -> bool:
    raw, sidecar = grid_paths(base)
    return raw.is_file() and sidecar.is_file()


def write_grid(grid: Grid, base: Path) -> Path:
    """Write grid to base.raw + base.json; returns the raw path"""
    raw, sidecar = grid_paths(base)
    raw.parent.mkdir(parents=True, exist_ok=True)
    height, width = grid.shape
    header = {"width": width, "height": height, "unit": grid.unit.value, "kind": grid.kind.value}
    raw.write_bytes(np.ascontiguousarray(grid.values, dtype=RAW_DTYPE).tobytes(order="C"))
    sidecar.write_text(json.dumps(header, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return raw


def _read_header(sidecar: Path) -> tuple[int, int, GridUnit, GridKind]:
    try:
        header = json.loads(sidecar.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise GridFormatError(f"cannot read grid sidecar {sidecar}: {exc}") from exc
    if not isinstance(header, dict):
        raise GridFormatError(f"grid sidecar {sidecar}: JSON root must be an object")
    try:
        width = int(header["width"])
        height = int(header["height"])
        unit = GridUnit(header["unit"])
        kind = GridKind(header["kind"])
    except (KeyError, TypeError, ValueError) as exc:
        raise GridFormatError(f"grid sidecar {sidecar}: invalid header ({exc})") from exc
    if width < 1 or height < 1:
        raise GridFormatError(f"grid sidecar {sidecar}: dimensions must be positive")
    return width, height, unit, kind


def read_grid(base: Path) -> Grid:
    """Read a grid pair; the sidecar's kind decides the returned type"""
    raw, sidecar = grid_paths(base)
    width, height, unit, kind = _read_header(sidecar)
    try:
        payload = raw.read_bytes()
    except OSError as exc:
        raise GridFormatError(f"cannot read grid values {raw}: {exc}") from exc
    expected = width * height * RAW_DTYPE.itemsize
    if len(payload) != expected:
        raise GridFormatError(f"grid {raw}: expected {expected} bytes for {height}x{width}, got {len(payload)}")
    values = np.frombuffer(payload, dtype=RAW_DTYPE).reshape(height, width).astype(np.float64)

    if kind == GridKind.IMAGE:
        return Image(values, unit)
    if kind == GridKind.MASK:
        return MetalMask(values)
    return Sinogram(values, unit)


def read_image(base: Path) -> Image:
    grid = read_grid(base)
    if not isinstance(grid, Image):
        raise GridFormatError(f"grid {base} is a {grid.kind.value}, expected an image")
    return grid


def read_sinogram(base: Path) -> Sinogram:
    grid = read_grid(base)
    if not isinstance(grid, Sinogram):
        raise GridFormatError(f"grid {base} is a {grid.kind.value}, expected a sinogram")
    return grid


def read_mask(base: Path) -> MetalMask:
    grid = read_grid(base)
    if isinstance(grid, MetalMask):
        return grid
    # masks exported by other tools are sometimes tagged as images
    if isinstance(grid, Image):
        return MetalMask(grid.values)
    raise GridFormatError(f"grid {base} is a {grid.kind.value}, expected a mask")
