import math

import numpy as np
import pytest
from rich.console import Console

from ctmar.errors import DimensionMismatchError, InvalidInputError, UnitMismatchError
from ctmar.metrics.evaluation import EvalCase, aggregate, build_report, evaluate_dataset, render_report, write_report_csv
from ctmar.metrics.image_quality import preview_bytes, psnr, reference_psnr, sino_mse, ssim, window_image
from ctmar.models.enums import GridUnit
from ctmar.models.grids import Image, Sinogram
from ctmar.models.report import CaseMetrics
from ctmar.physics.simulation import simulate_case

from tests.helpers import disk_mask, soft_tissue_disk


def _hu(values) -> Image:
    return Image(np.asarray(values, dtype=np.float64), GridUnit.HU)


class TestImageMetrics:
    def test_window(self):
        out = window_image(_hu([[-1000.0, -175.0, 50.0, 275.0, 3000.0]]))
        assert out.unit == GridUnit.NORMALIZED
        np.testing.assert_allclose(out.values, [[0.0, 0.0, 0.5, 1.0, 1.0]])

    def test_window_needs_hu(self):
        with pytest.raises(UnitMismatchError):
            window_image(Image(np.zeros((2, 2)), GridUnit.ATTENUATION))

    def test_window_bounds(self):
        with pytest.raises(InvalidInputError):
            window_image(_hu(np.zeros((2, 2))), 100.0, 100.0)

    def test_psnr_identical_is_capped(self, rng):
        a = _hu(rng.uniform(-200, 300, (16, 16)))
        assert psnr(a, a) == 99.0

    def test_psnr_known_value(self):
        a = _hu(np.full((8, 8), 50.0))
        b = _hu(np.full((8, 8), 95.0))
        # a constant 0.1 windowed offset is not a binary fraction, so this is 20 dB up to round-off
        assert psnr(a, b) == pytest.approx(20.0, rel=1e-12)
        assert psnr(b, a) == psnr(a, b)

    def test_psnr_is_exactly_20_db_for_a_one_percent_error(self):
        a = np.full((10, 10), -175.0)
        b = a.copy()
        b[3, 4] = 275.0
        assert psnr(_hu(a), _hu(b)) == 20.0

    def test_psnr_ignores_differences_outside_the_window(self):
        a = _hu(np.full((4, 4), 1000.0))
        b = _hu(np.full((4, 4), 2000.0))
        assert psnr(a, b) == 99.0

    def test_psnr_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            psnr(_hu(np.zeros((4, 4))), _hu(np.zeros((4, 5))))

    def test_ssim(self, rng):
        a = _hu(rng.uniform(-175, 275, (32, 32)))
        assert ssim(a, a) == 1.0
        noisy = _hu(a.values + rng.normal(0.0, 60.0, a.shape))
        assert 0.0 < ssim(a, noisy) < 1.0

    def test_ssim_is_symmetric_and_bounded(self, rng):
        for _ in range(5):
            a = _hu(rng.uniform(-300, 400, (24, 24)))
            b = _hu(rng.uniform(-300, 400, (24, 24)))
            assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)
            assert -1.0 <= ssim(a, b) <= 1.0

    def test_ssim_of_an_inverted_image_is_low(self, rng):
        a = _hu(rng.uniform(-175, 275, (32, 32)))
        inverted = _hu(100.0 - a.values)
        assert ssim(a, inverted) < 0.5

    def test_ssim_approaches_one_as_noise_shrinks(self, rng):
        a = _hu(rng.uniform(-100, 200, (32, 32)))
        noise = rng.normal(size=a.shape)
        scores = [ssim(a, _hu(a.values + sigma * noise)) for sigma in (60.0, 20.0, 5.0, 1.0)]
        assert scores == sorted(scores)
        assert scores[-1] > 0.99

    def test_ssim_needs_a_full_window(self):
        with pytest.raises(InvalidInputError):
            ssim(_hu(np.zeros((8, 8))), _hu(np.zeros((8, 8))))
        assert ssim(_hu(np.zeros((11, 11))), _hu(np.zeros((11, 11)))) == 1.0

    def test_sino_mse(self):
        a = Sinogram(np.array([[1.0, 2.0], [3.0, 4.0]]))
        b = Sinogram(np.array([[1.0, 0.0], [3.0, 8.0]]))
        trace = Sinogram(np.array([[0.0, 1.0], [0.0, 0.0]]), GridUnit.BINARY)
        assert sino_mse(a, b) == pytest.approx(5.0)
        assert sino_mse(a, b, trace) == pytest.approx(4.0)
        assert sino_mse(a, b, Sinogram(np.zeros((2, 2)), GridUnit.BINARY)) == 0.0

    def test_reference_psnr_region(self):
        a = np.zeros((2, 2))
        b = np.array([[0.1, 0.0], [0.0, 5.0]])
        region = np.array([[True, True], [True, False]])
        assert reference_psnr(a, b, 1.0, region=region) == pytest.approx(10 * math.log10(1.0 / (0.01 / 3)))
        with pytest.raises(InvalidInputError):
            reference_psnr(a, b, 0.0)

    def test_preview(self):
        out = preview_bytes(_hu([[-1000.0, 275.0]]))
        assert out.dtype == np.uint8
        np.testing.assert_array_equal(out, [[0, 255]])


def _metrics(case_id, group, p, s, m, t) -> CaseMetrics:
    return CaseMetrics(case_id, group, p, s, m, t)


class TestReport:
    CASES = [_metrics("b", 3, 30.0, 0.75, 1.0, 0.5), _metrics("a", 1, 20.0, 0.5, 2.0, 4.0)]

    def test_aggregate_of_nothing_is_nan(self):
        agg = aggregate("group_2", 2, [])
        assert agg.n_cases == 0
        assert math.isnan(agg.psnr_db)

    def test_groups_and_overall(self):
        report = build_report(self.CASES)
        assert [c.case_id for c in report.cases] == ["a", "b"]
        assert report.group(1).n_cases == 1
        assert report.group(3).psnr_db == 30.0
        assert report.overall.psnr_db == 25.0
        assert report.overall.n_cases == 2

    def test_overall_is_the_count_weighted_mean_of_groups(self, rng):
        cases = [_metrics(f"c{i}", int(rng.integers(1, 6)), *rng.uniform(0.0, 40.0, 4)) for i in range(23)]
        report = build_report(cases)
        filled = [g for g in report.groups if g.n_cases]
        assert sum(g.n_cases for g in report.groups) == report.overall.n_cases == 23
        weighted = sum(g.n_cases * g.psnr_db for g in filled) / 23
        assert report.overall.psnr_db == pytest.approx(weighted, rel=1e-12)

    def test_csv(self, tmp_path):
        path = write_report_csv(build_report(self.CASES), tmp_path / "report.csv")
        assert path.read_text().splitlines() == [
            "case_id,group,psnr_db,ssim,sino_mse,sino_mse_trace",
            "a,1,20,0.5,2,4",
            "b,3,30,0.75,1,0.5",
            "group_1,1,20,0.5,2,4",
            "group_2,2,,,,",
            "group_3,3,30,0.75,1,0.5",
            "group_4,4,,,,",
            "group_5,5,,,,",
            "overall,,25,0.625,1.5,2.25",
        ]

    def test_render(self):
        console = Console(record=True, width=140)
        table = render_report(build_report(self.CASES), console)
        assert len(table.columns) == 7
        text = console.export_text()
        assert "G1 (n=1)" in text and "Average" in text
        assert "25.00" in text


class TestEvaluateDataset:
    @pytest.fixture
    def case(self, desk_geo, spectrum):
        x_gt = soft_tissue_disk(desk_geo, 27.0, 40.0)
        mask = disk_mask(desk_geo, 2.0, 2.0, 3.0)
        return simulate_case(x_gt, spectrum.insert("iron", mask), spectrum, desk_geo, case_id="only")

    def test_ground_truth_scores_perfectly(self, case):
        report = evaluate_dataset([EvalCase(case, case.x_gt, case.s_gt)])
        m = report.cases[0]
        assert m.psnr_db == 99.0
        assert m.ssim == 1.0
        assert m.sino_mse == 0.0 and m.sino_mse_trace == 0.0
        assert report.group(5).n_cases == 1

    def test_workers_do_not_change_results(self, case):
        items = [EvalCase(case, case.x_ma, case.s_ma), EvalCase(case, case.x_gt, case.s_li)]
        assert evaluate_dataset(items, workers=1).cases == evaluate_dataset(items, workers=2).cases

    def test_uncorrected_sinogram_differs_only_on_trace(self, case):
        m = evaluate_dataset([EvalCase(case, case.x_ma, case.s_ma)]).cases[0]
        assert m.sino_mse_trace > m.sino_mse > 0.0
        assert m.psnr_db < 99.0

    def test_empty(self):
        with pytest.raises(InvalidInputError):
            evaluate_dataset([])
