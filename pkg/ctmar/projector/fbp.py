"""Filtered back projection and its vector-Jacobian product.

fbp(S) = c · Pᵀ F S with c = π·d / (n_angles·p²); the same factor serves full- and half-turn
parallel scans. Fan-beam data are rebinned to the parallel-equivalent geometry first.
Since fbp is linear, ril_vjp(y) = c · F P y (F is self-adjoint) is its exact transpose.
"""
from __future__ import annotations

import math

from ctmar.models.enums import BeamModel, GridUnit
from ctmar.models.geometry import Geometry
from ctmar.models.grids import Image, Sinogram
from ctmar.projector.filters import RampFilter, filter_rows
from ctmar.projector.projector import get_projector
from ctmar.projector.rebinning import rebin_adjoint, rebin_to_parallel


def fbp_scale(geo: Geometry) -> float:
    return math.pi * geo.detector_spacing / (geo.n_angles * geo.pixel_size**2)


def _parallel(geo: Geometry) -> Geometry:
    return geo if geo.beam_model == BeamModel.PARALLEL else geo.parallel_equivalent()


def fbp(sino: Sinogram, geo: Geometry, filt: RampFilter | None = None, workers: int = 1) -> Image:
    """Reconstruct an attenuation image; linear in sino"""
    sino.require_geometry(geo, "fbp input")
    filt = (filt or RampFilter.for_geometry(geo)).require_detectors(geo.n_detectors)
    values = sino.values
    if geo.beam_model == BeamModel.FAN_EQUIANGULAR:
        values = rebin_to_parallel(values, geo)
    parallel = _parallel(geo)
    image = get_projector(parallel, workers).back(filter_rows(values, filt)) * fbp_scale(geo)
    return Image(image, GridUnit.ATTENUATION)


def ril_vjp(cotangent: Image, geo: Geometry, filt: RampFilter | None = None, workers: int = 1) -> Sinogram:
    """Gradient of <fbp(s), cotangent> with respect to s"""
    cotangent.require_geometry(geo, "ril_vjp cotangent")
    filt = (filt or RampFilter.for_geometry(geo)).require_detectors(geo.n_detectors)
    parallel = _parallel(geo)
    values = filter_rows(get_projector(parallel, workers).forward(cotangent.values), filt) * fbp_scale(geo)
    if geo.beam_model == BeamModel.FAN_EQUIANGULAR:
        values = rebin_adjoint(values, geo)
    return Sinogram(values, GridUnit.LINE_INTEGRAL)
