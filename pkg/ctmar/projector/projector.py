"""Forward projector P and its exact transpose.

Both directions walk the same per-angle RayPlan, so back_project is the true transpose of
forward_project rather than a separately discretised smearing.
"""
from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numpy as np

from ctmar.errors import DimensionMismatchError
from ctmar.models.enums import GridUnit
from ctmar.models.geometry import Geometry
from ctmar.models.grids import Image, Sinogram
from ctmar.projector.ray_sampling import RayPlan, build_plan, sample_step
from ctmar.settings import settings

logger = logging.getLogger(__name__)


class PlanCache:
    """Ray plans admitted until a byte budget is spent, never evicted.

    Angles past the budget are rebuilt on every sweep.
    """

    def __init__(self, budget_bytes: int) -> None:
        self._budget = budget_bytes
        self._plans: dict[int, RayPlan] = {}
        self._size = 0
        self._lock = threading.Lock()

    def get(self, key: int) -> RayPlan | None:
        return self._plans.get(key)

    def put(self, key: int, plan: RayPlan) -> bool:
        """Admit a plan if it still fits; returns whether it is resident"""
        with self._lock:
            if key in self._plans:
                return True
            if self._size + plan.nbytes > self._budget:
                return False
            self._plans[key] = plan
            self._size += plan.nbytes
            return True

    @property
    def size_bytes(self) -> int:
        return self._size

    def __len__(self) -> int:
        return len(self._plans)


class Projector:
    """P and Pᵀ for one geometry.

    Angles are split into `workers` contiguous blocks. Back-projected block images are
    added in block order, so results are bitwise reproducible for a fixed worker count.
    """

    def __init__(self, geo: Geometry, workers: int = 1, cache_mb: int | None = None) -> None:
        self.geo = geo
        self.workers = max(1, workers)
        self.step = sample_step(geo)
        budget = (settings.plan_cache_mb if cache_mb is None else cache_mb) * 1024 * 1024
        self._cache = PlanCache(budget)
        self._padded_width = geo.image_size + 2

    def plan(self, angle_index: int) -> RayPlan:
        plan = self._cache.get(angle_index)
        if plan is None:
            plan = build_plan(self.geo, angle_index)
            self._cache.put(angle_index, plan)
        return plan

    def _blocks(self) -> list[range]:
        n = self.geo.n_angles
        n_blocks = min(self.workers, n)
        edges = np.linspace(0, n, n_blocks + 1).round().astype(int)
        return [range(edges[i], edges[i + 1]) for i in range(n_blocks)]

    def _run_blocks(self, fn) -> list:
        blocks = self._blocks()
        if len(blocks) == 1:
            return [fn(blocks[0])]
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            return list(pool.map(fn, blocks))

    def _pad(self, values: np.ndarray) -> np.ndarray:
        return np.pad(values, 1).ravel()

    def forward(self, values: np.ndarray) -> np.ndarray:
        """Ray sums of a (N, N) attenuation array; returns (n_angles, n_detectors)"""
        if values.shape != self.geo.image_shape:
            raise DimensionMismatchError("forward projection input", self.geo.image_shape, values.shape)
        padded = self._pad(np.asarray(values, dtype=np.float64))
        width = self._padded_width
        n_det = self.geo.n_detectors
        out = np.zeros(self.geo.sinogram_shape)

        def run(block: range) -> None:
            for k in block:
                p = self.plan(k)
                gx, gy = 1.0 - p.fx, 1.0 - p.fy
                sampled = (
                    gx * gy * padded[p.base]
                    + p.fx * gy * padded[p.base + 1]
                    + gx * p.fy * padded[p.base + width]
                    + p.fx * p.fy * padded[p.base + width + 1]
                )
                out[k] = np.bincount(p.ray, weights=sampled, minlength=n_det) * self.step

        self._run_blocks(run)
        return out

    def back(self, values: np.ndarray) -> np.ndarray:
        """Transpose of forward: smears (n_angles, n_detectors) back onto the (N, N) grid"""
        if values.shape != self.geo.sinogram_shape:
            raise DimensionMismatchError("back projection input", self.geo.sinogram_shape, values.shape)
        sino = np.asarray(values, dtype=np.float64)
        width = self._padded_width
        size = width * width

        def run(block: range) -> np.ndarray:
            acc = np.zeros(size)
            for k in block:
                p = self.plan(k)
                g = sino[k][p.ray] * self.step
                gx, gy = 1.0 - p.fx, 1.0 - p.fy
                acc += np.bincount(p.base, weights=g * gx * gy, minlength=size)
                acc += np.bincount(p.base + 1, weights=g * p.fx * gy, minlength=size)
                acc += np.bincount(p.base + width, weights=g * gx * p.fy, minlength=size)
                acc += np.bincount(p.base + width + 1, weights=g * p.fx * p.fy, minlength=size)
            return acc

        total = np.zeros(size)
        for partial in self._run_blocks(run):
            total += partial
        return total.reshape(width, width)[1:-1, 1:-1].copy()

    def project(self, img: Image) -> Sinogram:
        img.require_geometry(self.geo, "forward projection input")
        img.require_unit(GridUnit.ATTENUATION, "forward projection input")
        return Sinogram(self.forward(img.values), GridUnit.LINE_INTEGRAL)

    def backproject(self, sino: Sinogram) -> Image:
        sino.require_geometry(self.geo, "back projection input")
        return Image(self.back(sino.values), GridUnit.ATTENUATION)


@lru_cache(maxsize=8)
def get_projector(geo: Geometry, workers: int = 1) -> Projector:
    logger.debug("Creating projector for %sx%s image, %s angles, %s detectors (%s)",
                 geo.image_size, geo.image_size, geo.n_angles, geo.n_detectors, geo.beam_model.value)
    return Projector(geo, workers)


def forward_project(img: Image, geo: Geometry, workers: int = 1) -> Sinogram:
    """Discrete line integrals of an attenuation image; linear in img"""
    return get_projector(geo, workers).project(img)


def back_project(sino: Sinogram, geo: Geometry, workers: int = 1) -> Image:
    """Exact adjoint of forward_project"""
    return get_projector(geo, workers).backproject(sino)
