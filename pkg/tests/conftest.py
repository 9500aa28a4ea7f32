import numpy as np
import pytest

from ctmar.models.enums import BeamModel
from ctmar.models.geometry import Geometry
from ctmar.physics.spectrum_loader import load_spectrum


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def desk_geo() -> Geometry:
    """Adjoint-test scale: 64x64 image, 90 angles, 65 detectors"""
    return Geometry(n_angles=90, n_detectors=65, image_size=64)


@pytest.fixture(scope="session")
def fan_geo() -> Geometry:
    return Geometry(
        n_angles=90, n_detectors=65, image_size=64, beam_model=BeamModel.FAN_EQUIANGULAR, source_distance=200.0
    )


@pytest.fixture(scope="session")
def round_trip_geo() -> Geometry:
    """Small but well-sampled geometry for reconstruction quality checks"""
    return Geometry(n_angles=360, n_detectors=137, image_size=96)


@pytest.fixture(scope="session")
def spectrum():
    return load_spectrum()


