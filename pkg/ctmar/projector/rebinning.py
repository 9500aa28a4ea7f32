"""Fan-to-parallel rebinning as a sparse linear operator R.

Parallel bin (θ, s) is read from the fan bin with γ = arcsin(s/D) and β = θ − γ by bilinear
interpolation, cyclic along β and zero outside the detector fan. R is a plain matrix, so its
transpose gives the adjoint path of the fan-beam reconstruction exactly.
"""
from __future__ import annotations

import logging
from functools import lru_cache

import numpy as np
from scipy import sparse

from ctmar.errors import InvalidInputError
from ctmar.models.enums import BeamModel
from ctmar.models.geometry import Geometry
from ctmar.utils import not_none

logger = logging.getLogger(__name__)


@lru_cache(maxsize=4)
def rebinning_matrix(geo: Geometry) -> sparse.csr_matrix:
    """(parallel bins) x (fan bins) CSR matrix for a full-turn fan-beam geometry"""
    if geo.beam_model != BeamModel.FAN_EQUIANGULAR:
        raise InvalidInputError("rebinning is only defined for fan-beam geometries")
    if not geo.is_full_turn:
        raise InvalidInputError("fan-beam rebinning requires a full-turn scan")
    distance = not_none(geo.source_distance, "source_distance of a fan-beam geometry")
    n_angles, n_det = geo.sinogram_shape
    centre = (n_det - 1) / 2.0

    theta = geo.angles()[:, None]
    s = geo.detector_positions()[None, :]
    inside = np.broadcast_to(np.abs(s) < distance, (n_angles, n_det))
    gamma = np.arcsin(np.clip(s / distance, -1.0, 1.0))
    beta = theta - gamma

    u = gamma / geo.fan_angle_step + centre
    v = (beta - geo.angle_offset) / geo.angle_step
    u0 = np.floor(u)
    v0 = np.floor(v)
    fu = u - u0
    fv = v - v0

    target = np.arange(n_angles * n_det).reshape(n_angles, n_det)
    rows, cols, weights = [], [], []
    for dv, wv in ((0, 1.0 - fv), (1, fv)):
        angle_index = (v0.astype(np.int64) + dv) % n_angles
        for du, wu in ((0, 1.0 - fu), (1, fu)):
            det_index = u0.astype(np.int64) + du
            w = np.broadcast_to(wv * wu, (n_angles, n_det))
            valid = inside & (det_index >= 0) & (det_index < n_det) & (w > 0)
            rows.append(target[valid])
            cols.append((angle_index * n_det + det_index)[valid])
            weights.append(w[valid])

    size = n_angles * n_det
    matrix = sparse.coo_matrix(
        (np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)
    ).tocsr()
    logger.debug("Built fan rebinning operator with %s nonzeros", matrix.nnz)
    return matrix


def rebin_to_parallel(values: np.ndarray, geo: Geometry) -> np.ndarray:
    return (rebinning_matrix(geo) @ values.ravel()).reshape(geo.sinogram_shape)


def rebin_adjoint(values: np.ndarray, geo: Geometry) -> np.ndarray:
    return (rebinning_matrix(geo).T @ values.ravel()).reshape(geo.sinogram_shape)
