"""Multi-scale average pooling of the metal projection M_p (and of the binary trace)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ctmar.errors import InvalidInputError, UnitMismatchError
from ctmar.models.enums import GridUnit
from ctmar.models.grids import Sinogram


@dataclass(frozen=True, eq=False)
class PoolPyramid:
    """levels[k] has shape ceil(n_angles / 2^k) x ceil(n_detectors / 2^k)"""
    levels: tuple[Sinogram, ...]

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def shapes(self) -> list[tuple[int, int]]:
        return [level.shape for level in self.levels]

    def level(self, k: int) -> Sinogram:
        return self.levels[k]


def pool2x2(values: np.ndarray) -> np.ndarray:
    """Stride-2 mean pooling; cells on an odd edge average over the entries they actually cover"""
    h, w = values.shape
    pad = ((0, h % 2), (0, w % 2))
    shape = ((h + 1) // 2, 2, (w + 1) // 2, 2)
    sums = np.pad(values, pad).reshape(shape).sum(axis=(1, 3))
    counts = np.pad(np.ones_like(values), pad).reshape(shape).sum(axis=(1, 3))
    return sums / counts


def pool_pyramid(m_p: Sinogram, depth: int) -> PoolPyramid:
    if depth < 1:
        raise InvalidInputError(f"pyramid depth must be at least 1, got {depth}")
    if 2 ** (depth - 1) > min(m_p.shape):
        raise InvalidInputError(f"pyramid depth {depth} is too deep for a {m_p.shape[0]}x{m_p.shape[1]} grid")
    # pooled binary grids hold coverage fractions
    unit = GridUnit.DIMENSIONLESS if m_p.unit == GridUnit.BINARY else m_p.unit
    levels = [m_p]
    for _ in range(depth - 1):
        levels.append(Sinogram(pool2x2(levels[-1].values), unit))
    return PoolPyramid(tuple(levels))


def trace_pyramid(m_t: Sinogram, depth: int) -> PoolPyramid:
    """The same pooling applied to the binarised trace M_t"""
    if m_t.unit != GridUnit.BINARY:
        raise UnitMismatchError("trace_pyramid input", GridUnit.BINARY.value, m_t.unit.value)
    return pool_pyramid(m_t, depth)
