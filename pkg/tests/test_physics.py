import json
import logging
import math

import numpy as np
import pytest

from ctmar.core.coordinates import pixel_coordinates
from ctmar.core.phantoms import metal_mask
from ctmar.core.units import hu_to_mu, mu_to_hu
from ctmar.errors import InvalidInputError, SpectrumError
from ctmar.io.case_store import read_case, write_grids
from ctmar.marbase.li import prepare_trace
from ctmar.metrics.image_quality import psnr
from ctmar.models.case import TRACE_TOLERANCE, IngestedCase
from ctmar.models.enums import GridUnit, IngestFlag
from ctmar.models.grids import Image, MetalMask, Sinogram
from ctmar.models.spectrum import Material, Spectrum
from ctmar.physics.clinical import clinical_ingest
from ctmar.physics.simulation import (
    PoissonNoise,
    artifact_term,
    metal_mask_projection,
    metal_trace,
    residual_image,
    simulate_case,
    simulate_metal_sinogram,
)
from ctmar.physics.spectrum_loader import load_spectrum
from ctmar.projector import Projector, fbp, forward_project

from tests.helpers import disk_mask, random_attenuation, soft_tissue_disk

TWO_BIN = Spectrum((50.0, 90.0), (0.25, 0.75), {"m": Material("m", (0.5, 0.1), 1.0)})


def _residual(geo, rng, mask: MetalMask) -> Image:
    values = random_attenuation(geo, rng).values.copy()
    values[mask.as_bool()] = 0.0
    return Image(values, GridUnit.ATTENUATION)


class TestSpectrum:
    def test_bundled_spectrum(self, spectrum):
        assert spectrum.is_normalized
        assert {"titanium", "iron"} <= set(spectrum.materials)
        assert spectrum.material("titanium").density == pytest.approx(4.5e-3)

    def test_units_are_converted_to_millimetres(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({
            "energies_keV": [60, 80], "weights": [0.5, 0.5],
            "materials": {"x": {"lambda": [0.3, 0.2], "rho": 2.0}},
        }))
        material = load_spectrum(path).material("x")
        assert material.mass_attenuation == pytest.approx((30.0, 20.0))
        assert material.density == pytest.approx(2e-3)

    def test_unnormalized_weights(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({"energies_keV": [60, 80], "weights": [0.5, 0.6]}))
        with pytest.raises(SpectrumError):
            load_spectrum(path)

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text('{"weights": [1.0]}')
        with pytest.raises(SpectrumError):
            load_spectrum(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SpectrumError):
            load_spectrum(tmp_path / "nope.json")

    def test_unknown_material(self, spectrum):
        with pytest.raises(SpectrumError):
            spectrum.material("unobtainium")

    def test_energy_grid_mismatch(self, spectrum, desk_geo):
        insert = TWO_BIN.insert("m", MetalMask.empty(desk_geo))
        with pytest.raises(SpectrumError):
            artifact_term(1.0, spectrum, insert)


class TestMetalProjection:
    def test_empty_mask(self, desk_geo):
        m_p = metal_mask_projection(MetalMask.empty(desk_geo), desk_geo)
        assert not m_p.values.any()
        assert not metal_trace(m_p).values.any()

    def test_nonnegative(self, desk_geo, rng):
        m_p = metal_mask_projection(metal_mask(desk_geo, rng, 40), desk_geo)
        assert m_p.values.min() >= 0.0
        assert m_p.values.max() > 0.0

    def test_single_pixel_support(self, desk_geo):
        values = np.zeros(desk_geo.image_shape)
        values[20, 37] = 1.0
        m_p = metal_mask_projection(MetalMask(values), desk_geo).values
        x, y = pixel_coordinates(desk_geo)
        px, py = x[20, 37], y[20, 37]
        theta = desk_geo.angles()[:, None]
        s = desk_geo.detector_positions()[None, :]
        distance = np.abs(px * np.cos(theta) + py * np.sin(theta) - s)
        assert np.all(distance[m_p > 0] <= math.sqrt(2.0) * desk_geo.pixel_size + 1e-9)
        assert np.all((m_p > 0).sum(axis=1) >= 1)

    def test_trace_support_is_the_union_of_pixel_footprints(self, desk_geo, rng):
        projector = Projector(desk_geo)
        for _ in range(10):
            mask = metal_mask(desk_geo, rng, rng.uniform(3, 15))
            expected = np.zeros(desk_geo.sinogram_shape, dtype=bool)
            for row, col in zip(*np.nonzero(mask.as_bool())):
                pixel = np.zeros(desk_geo.image_shape)
                pixel[row, col] = 1.0
                expected |= projector.forward(pixel) > TRACE_TOLERANCE
            trace = metal_trace(metal_mask_projection(mask, desk_geo))
            np.testing.assert_array_equal(trace.support(), expected)

    def test_trace_is_indicator(self):
        m_p = Sinogram(np.array([[0.0, 5e-13, 0.2], [1.0, 0.0, 3.0]]))
        np.testing.assert_array_equal(metal_trace(m_p).values, [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0]])
        assert metal_trace(m_p).unit == GridUnit.BINARY

    def test_trace_rejects_negative(self):
        with pytest.raises(InvalidInputError):
            metal_trace(Sinogram(np.array([[-0.1, 1.0]])))


class TestArtifactTerm:
    def test_two_energy_value(self, desk_geo):
        insert = TWO_BIN.insert("m", MetalMask.empty(desk_geo))
        expected = -math.log(0.25 * math.exp(-1.0) + 0.75 * math.exp(-0.2))
        assert float(artifact_term(2.0, TWO_BIN, insert)) == pytest.approx(expected, rel=1e-12)

    def test_monochromatic_is_linear(self, desk_geo):
        mono = Spectrum.monochromatic(70.0, Material("ti", (0.4,), 0.05))
        insert = mono.insert("ti", MetalMask.empty(desk_geo))
        m = np.linspace(0.0, 30.0, 50)
        np.testing.assert_allclose(artifact_term(m, mono, insert), 0.02 * m, rtol=1e-12, atol=1e-15)

    def test_shape_of_the_beam_hardening_curve(self, spectrum, desk_geo):
        insert = spectrum.insert("titanium", MetalMask.empty(desk_geo))
        m = np.linspace(0.0, 40.0, 201)
        term = artifact_term(m, spectrum, insert)
        mu = insert.linear_attenuation()
        assert term[0] == pytest.approx(0.0, abs=1e-12)
        assert np.all(np.diff(term) > 0.0)
        assert np.all(np.diff(term, 2) <= 1e-12)
        assert np.all(term <= spectrum.effective_attenuation("titanium") * m + 1e-12)
        assert np.all(term >= mu.min() * m - 1e-12)


class TestSimulation:
    def test_monochromatic_collapse(self, desk_geo, rng):
        mono = Spectrum.monochromatic(70.0, Material("ti", (0.4,), 0.05))
        for _ in range(10):
            mask = metal_mask(desk_geo, rng, rng.uniform(5, 60))
            x_r = _residual(desk_geo, rng, mask)
            s_ma, s_gt, _ = simulate_metal_sinogram(x_r, mono.insert("ti", mask), mono, desk_geo)
            combined = Image(x_r.values + 0.02 * mask.values, GridUnit.ATTENUATION)
            np.testing.assert_allclose(s_ma.values, forward_project(combined, desk_geo).values,
                                       rtol=1e-10, atol=1e-12)
            np.testing.assert_array_equal(s_gt.values, forward_project(x_r, desk_geo).values)

    def test_monochromatic_case_reconstructs_the_combined_sinogram(self, desk_geo):
        mono = Spectrum.monochromatic(70.0, Material("ti", (0.4,), 0.05))
        mask = disk_mask(desk_geo, 5.0, 3.0, 3.0)
        insert = mono.insert("ti", mask)
        case = simulate_case(soft_tissue_disk(desk_geo, 26.0, 40.0), insert, mono, desk_geo)
        combined = Sinogram(case.s_gt.values + insert.linear_attenuation()[0] * case.m_p.values)
        expected = mu_to_hu(fbp(combined, desk_geo))
        np.testing.assert_allclose(case.x_ma.values, expected.values, rtol=1e-9, atol=1e-6)

    def test_off_trace_bins_are_untouched(self, desk_geo, rng, spectrum):
        mask = disk_mask(desk_geo, 6.0, -4.0, 3.0)
        x_r = _residual(desk_geo, rng, mask)
        s_ma, s_gt, m_p = simulate_metal_sinogram(x_r, spectrum.insert("titanium", mask), spectrum, desk_geo)
        off = ~metal_trace(m_p).support()
        assert off.any()
        np.testing.assert_array_equal(s_ma.values[off], s_gt.values[off])
        assert np.all(s_ma.values[~off] > s_gt.values[~off])

    def test_empty_mask_keeps_ground_truth(self, desk_geo, rng, spectrum):
        mask = MetalMask.empty(desk_geo)
        x_r = random_attenuation(desk_geo, rng)
        s_ma, s_gt, m_p = simulate_metal_sinogram(x_r, spectrum.insert("iron", mask), spectrum, desk_geo)
        np.testing.assert_array_equal(s_ma.values, s_gt.values)
        assert not m_p.values.any()

    def test_metal_pixels_must_be_removed(self, desk_geo, rng, spectrum):
        mask = disk_mask(desk_geo, 0.0, 0.0, 3.0)
        with pytest.raises(InvalidInputError):
            simulate_metal_sinogram(random_attenuation(desk_geo, rng), spectrum.insert("titanium", mask),
                                    spectrum, desk_geo)

    def test_residual_image(self, desk_geo):
        x_gt = soft_tissue_disk(desk_geo, 25.0)
        mask = disk_mask(desk_geo, 0.0, 0.0, 4.0)
        x_r = residual_image(x_gt, mask, 0.02)
        assert x_r.unit == GridUnit.ATTENUATION
        assert np.all(x_r.values[mask.as_bool()] == 0.0)
        outside = ~mask.as_bool()
        np.testing.assert_array_equal(x_r.values[outside], hu_to_mu(x_gt, 0.02).values[outside])

    def test_poisson_noise_is_seeded(self, desk_geo, rng):
        sino = forward_project(random_attenuation(desk_geo, rng), desk_geo)
        a = PoissonNoise(1e5, seed=3).apply(sino).values
        np.testing.assert_array_equal(a, PoissonNoise(1e5, seed=3).apply(sino).values)
        assert not np.array_equal(a, sino.values)
        quiet = PoissonNoise(1e12, seed=3).apply(sino).values
        np.testing.assert_allclose(quiet, sino.values, atol=1e-4)

    def test_simulate_case(self, desk_geo, spectrum):
        x_gt = soft_tissue_disk(desk_geo, 26.0, 40.0)
        mask = disk_mask(desk_geo, 5.0, 3.0, 3.0)
        case = simulate_case(x_gt, spectrum.insert("titanium", mask), spectrum, desk_geo, case_id="c1")
        assert case.metal_size_group == 5
        assert case.x_ma.unit == GridUnit.HU
        np.testing.assert_array_equal(case.m_t.values, metal_trace(case.m_p).values)
        outside = ~prepare_trace(case.m_t, 1).support()
        np.testing.assert_array_equal(case.s_li.values[outside], case.s_ma.values[outside])
        assert set(case.grids()) == {"X_gt", "M", "S_gt", "S_ma", "X_ma", "M_p", "M_t", "S_LI"}

    def test_simulate_case_without_metal(self, desk_geo, spectrum, caplog):
        x_gt = soft_tissue_disk(desk_geo, 26.0)
        insert = spectrum.insert("titanium", MetalMask.empty(desk_geo))
        with caplog.at_level(logging.WARNING):
            case = simulate_case(x_gt, insert, spectrum, desk_geo, case_id="empty")
        assert case.metal_size_group is None
        assert "[case empty]" in caplog.text
        np.testing.assert_array_equal(case.s_li.values, case.s_ma.values)


class TestClinicalIngest:
    @staticmethod
    def _slice(geo, metal_radius: float) -> Image:
        values = soft_tissue_disk(geo, 26.0, 30.0).values.copy()
        if metal_radius > 0:
            values[disk_mask(geo, 2.0, 1.0, metal_radius).as_bool()] = 4000.0
        return Image(values, GridUnit.HU)

    def test_large_implant(self, desk_geo):
        x = self._slice(desk_geo, 7.0)
        case = clinical_ingest(x, desk_geo, case_id="big")
        assert case.flags == []
        np.testing.assert_array_equal(case.mask.as_bool(), x.values >= 2500.0)
        np.testing.assert_array_equal(case.s_ma.values, forward_project(hu_to_mu(x), desk_geo).values)
        np.testing.assert_array_equal(case.m_t.values, metal_trace(case.m_p).values)

    def test_small_implant_is_flagged(self, desk_geo):
        case = clinical_ingest(self._slice(desk_geo, 3.0), desk_geo)
        assert case.flags == [IngestFlag.BELOW_SELECTION_CRITERION]
        assert not case.mask.is_empty

    def test_no_metal(self, desk_geo):
        case = clinical_ingest(self._slice(desk_geo, 0.0), desk_geo)
        assert case.flags == [IngestFlag.EMPTY_METAL, IngestFlag.BELOW_SELECTION_CRITERION]
        assert not case.m_t.values.any()

    def test_written_case_reads_back_as_ingested(self, desk_geo, tmp_path):
        case = clinical_ingest(self._slice(desk_geo, 7.0), desk_geo, case_id="clin")
        write_grids(case.grids(), tmp_path / "clin")
        loaded = read_case(tmp_path / "clin", (60, 200, 500, 1200))
        assert isinstance(loaded, IngestedCase)
        assert loaded.case_id == "clin"
        np.testing.assert_array_equal(loaded.m_t.values, case.m_t.values)

    def test_simulated_image_round_trips_through_ingestion(self, round_trip_geo):
        mono = Spectrum.monochromatic(70.0, Material("ti", (0.6,), 0.05))
        x, y = pixel_coordinates(round_trip_geo)
        x_gt = Image(-1000.0 + 1040.0 * np.exp(-(x**2 + y**2) / (2 * 15.0**2)), GridUnit.HU)
        mask = disk_mask(round_trip_geo, 4.0, 3.0, 3.0)
        case = simulate_case(x_gt, mono.insert("ti", mask), mono, round_trip_geo)
        ingested = clinical_ingest(case.x_ma, round_trip_geo, case_id="round_trip")
        assert psnr(mu_to_hu(fbp(ingested.s_ma, round_trip_geo)), case.x_ma) >= 30.0
