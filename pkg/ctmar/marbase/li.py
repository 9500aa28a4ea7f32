"""Linear-interpolation inpainting of the metal trace, row by row."""
from __future__ import annotations

import logging

import numpy as np
from scipy.ndimage import binary_dilation

from ctmar.errors import InvalidInputError
from ctmar.models.case import InpaintResult
from ctmar.models.enums import GridUnit
from ctmar.models.geometry import Geometry
from ctmar.models.grids import Sinogram, require_same_shape

logger = logging.getLogger(__name__)


def prepare_trace(m_t: Sinogram, dilation: int = 1) -> Sinogram:
    """Grow the trace by `dilation` bins along the detector axis; 0 returns it unchanged"""
    if dilation < 0:
        raise InvalidInputError(f"trace dilation must be nonnegative, got {dilation}")
    if dilation == 0 or not m_t.support().any():
        return m_t
    grown = binary_dilation(m_t.support(), structure=np.ones((1, 3), dtype=bool), iterations=dilation)
    return Sinogram(grown.astype(np.float64), GridUnit.BINARY)


def _fill_rows(values: np.ndarray, trace: np.ndarray) -> list[int]:
    """Interpolate trace bins in place; returns rows with no anchor at all"""
    n_det = values.shape[1]
    detectors = np.arange(n_det)
    uncovered: list[int] = []
    for i in np.flatnonzero(trace.any(axis=1)):
        bad = trace[i]
        good = ~bad
        if not good.any():
            uncovered.append(int(i))
            continue
        # np.interp holds the end value beyond the outermost anchors
        values[i, bad] = np.interp(detectors[bad], detectors[good], values[i, good])
    return uncovered


def _fill_angles(values: np.ndarray, rows: list[int], periodic: bool) -> None:
    n_angles = values.shape[0]
    ok = np.setdiff1d(np.arange(n_angles), rows)
    period = n_angles if periodic else None
    for j in range(values.shape[1]):
        values[rows, j] = np.interp(rows, ok, values[ok, j], period=period)


def li_inpaint(s_ma: Sinogram, m_t: Sinogram, geo: Geometry | None = None) -> InpaintResult:
    """Replace trace bins by linear interpolation between their nearest off-trace neighbours.

    Off-trace bins are returned bitwise unchanged. Angle rows with every detector on the
    trace are filled along the angle axis instead (cyclically on full-turn geometries)
    and reported in fallback_rows.
    """
    require_same_shape("li_inpaint inputs", s_ma, m_t)
    trace = m_t.support()
    if not trace.any():
        return InpaintResult(s_ma)
    if trace.all():
        raise InvalidInputError("metal trace covers the whole sinogram; nothing to interpolate from")

    values = np.array(s_ma.values)
    fallback = _fill_rows(values, trace)
    if fallback:
        logger.warning("LI: %s angle row(s) fully inside the trace, interpolating along angles", len(fallback))
        _fill_angles(values, fallback, periodic=geo is not None and geo.is_full_turn)
    return InpaintResult(s_ma.with_values(values), fallback)
