import math

import numpy as np
import pytest

from ctmar.core.coordinates import inscribed_circle, pixel_coordinates
from ctmar.core.grouping import metal_size_group
from ctmar.core.phantoms import body_phantom, group_targets, metal_mask, shepp_logan
from ctmar.core.units import hu_to_mu, mu_to_hu
from ctmar.errors import InvalidInputError, NoMetalError, UnitMismatchError
from ctmar.models.enums import BeamModel, GridUnit
from ctmar.models.geometry import Geometry
from ctmar.models.grids import Image, MetalMask, Sinogram

MU_WATER = 0.02


class TestUnits:
    def test_reference_points(self):
        hu = Image(np.array([[0.0, -1000.0, 1000.0]]), GridUnit.HU)
        mu = hu_to_mu(hu, MU_WATER)
        assert mu.unit == GridUnit.ATTENUATION
        np.testing.assert_allclose(mu.values, [[MU_WATER, 0.0, 2 * MU_WATER]], rtol=0, atol=1e-15)

    def test_clamped_below_air(self):
        mu = hu_to_mu(Image(np.array([[-1500.0]]), GridUnit.HU), MU_WATER)
        assert mu.values[0, 0] == 0.0

    def test_inverse_reference_points(self):
        mu = Image(np.array([[MU_WATER, 0.0]]), GridUnit.ATTENUATION)
        np.testing.assert_allclose(mu_to_hu(mu, MU_WATER).values, [[0.0, -1000.0]], atol=1e-12)

    def test_round_trip(self, rng):
        hu = Image(rng.uniform(-1000.0, 3000.0, (16, 16)), GridUnit.HU)
        back = mu_to_hu(hu_to_mu(hu, MU_WATER), MU_WATER)
        np.testing.assert_allclose(back.values, hu.values, rtol=1e-12, atol=1e-9)

    def test_wrong_unit(self):
        with pytest.raises(UnitMismatchError):
            hu_to_mu(Image(np.zeros((2, 2)), GridUnit.ATTENUATION))
        with pytest.raises(UnitMismatchError):
            mu_to_hu(Image(np.zeros((2, 2)), GridUnit.HU))

    def test_nonpositive_mu_water(self):
        with pytest.raises(InvalidInputError):
            hu_to_mu(Image(np.zeros((2, 2)), GridUnit.HU), 0.0)


class TestGrouping:
    THRESHOLDS = (60, 200, 500, 1200)

    @staticmethod
    def _mask(count: int) -> MetalMask:
        values = np.zeros(64 * 64)
        values[:count] = 1.0
        return MetalMask(values.reshape(64, 64))

    @pytest.mark.parametrize(
        "count,group",
        [(2000, 1), (1201, 1), (1200, 2), (700, 2), (500, 3), (300, 3), (200, 4), (100, 4), (60, 5), (1, 5)],
    )
    def test_bins_and_ties(self, count, group):
        assert metal_size_group(self._mask(count), self.THRESHOLDS) == group

    def test_monotone(self):
        groups = [metal_size_group(self._mask(c), self.THRESHOLDS) for c in range(1, 2000, 37)]
        assert all(b <= a for a, b in zip(groups, groups[1:]))

    def test_empty_mask_is_not_a_group(self):
        with pytest.raises(NoMetalError):
            metal_size_group(self._mask(0), self.THRESHOLDS)

    def test_thresholds_must_ascend(self):
        with pytest.raises(InvalidInputError):
            metal_size_group(self._mask(10), (60, 60, 500, 1200))


class TestGridTypes:
    def test_non_finite_rejected(self):
        with pytest.raises(InvalidInputError):
            Image(np.array([[np.nan]]), GridUnit.HU)

    def test_mask_must_be_binary(self):
        with pytest.raises(InvalidInputError):
            MetalMask(np.array([[0.5]]))

    def test_binary_sinogram_must_be_binary(self):
        with pytest.raises(InvalidInputError):
            Sinogram(np.array([[2.0]]), GridUnit.BINARY)

    def test_grids_are_read_only(self):
        img = Image(np.zeros((2, 2)), GridUnit.HU)
        with pytest.raises(ValueError):
            img.values[0, 0] = 1.0


class TestGeometry:
    def test_reference_defaults(self):
        geo = Geometry.reference()
        assert geo.image_shape == (416, 416)
        assert geo.sinogram_shape == (640, 641)
        assert geo.is_full_turn
        assert geo.beam_model == BeamModel.PARALLEL

    def test_centred_detectors(self):
        positions = Geometry(n_detectors=5, detector_spacing=2.0).detector_positions()
        np.testing.assert_array_equal(positions, [-4.0, -2.0, 0.0, 2.0, 4.0])

    def test_angles_exclude_endpoint(self):
        angles = Geometry(n_angles=4).angles()
        np.testing.assert_allclose(angles, [0.0, math.pi / 2, math.pi, 3 * math.pi / 2])

    def test_fan_requires_source_distance(self):
        with pytest.raises(ValueError):
            Geometry(beam_model=BeamModel.FAN_EQUIANGULAR)

    def test_fan_source_outside_image(self):
        with pytest.raises(ValueError):
            Geometry(image_size=64, beam_model=BeamModel.FAN_EQUIANGULAR, source_distance=40.0)


class TestCoordinatesAndPhantoms:
    def test_pixel_coordinates_are_centred(self):
        x, y = pixel_coordinates(Geometry(image_size=4))
        np.testing.assert_array_equal(x[0], [-1.5, -0.5, 0.5, 1.5])
        np.testing.assert_array_equal(y[:, 0], [-1.5, -0.5, 0.5, 1.5])

    def test_inscribed_circle(self):
        circle = inscribed_circle(Geometry(image_size=64))
        assert circle[32, 32] and not circle[0, 0]

    def test_shepp_logan_inside_circle(self, desk_geo):
        phantom = shepp_logan(desk_geo)
        assert phantom.unit == GridUnit.ATTENUATION
        assert np.all(phantom.values[~inscribed_circle(desk_geo)] == 0.0)
        assert phantom.values.max() > 0.0

    def test_body_phantom_is_deterministic(self, desk_geo):
        a = body_phantom(desk_geo, np.random.default_rng(5))
        b = body_phantom(desk_geo, np.random.default_rng(5))
        np.testing.assert_array_equal(a.values, b.values)
        assert a.unit == GridUnit.HU
        assert a.values.min() < -900.0 and a.values.max() > 300.0

    def test_metal_mask_sizes_follow_targets(self, round_trip_geo):
        rng = np.random.default_rng(0)
        small = metal_mask(round_trip_geo, rng, 10).pixel_count
        large = metal_mask(round_trip_geo, rng, 400).pixel_count
        assert 1 <= small < large
        assert 100 < large < 800

    def test_group_targets_fall_in_their_groups(self):
        thresholds = (60, 200, 500, 1200)
        for group, target in enumerate(group_targets(thresholds), start=1):
            values = np.zeros(64 * 64)
            values[: int(round(target))] = 1.0
            assert metal_size_group(MetalMask(values.reshape(64, 64)), thresholds) == group
