from ctmar.projector.fbp import fbp, ril_vjp
from ctmar.projector.filters import RampFilter, filter_sinogram
from ctmar.projector.projector import Projector, back_project, forward_project, get_projector

__all__ = [
    "Projector",
    "RampFilter",
    "back_project",
    "fbp",
    "filter_sinogram",
    "forward_project",
    "get_projector",
    "ril_vjp",
]
