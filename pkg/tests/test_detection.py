import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roguewave.cs_recovery import make_plan, recover, sample
from roguewave.detection import (
    DEFAULT_THRESHOLD,
    NOISE_MEDIAN_SCORE,
    ROGUE_T3_SCORE,
    calibrate,
    detect,
    envelope_scaleogram,
    locate_apex,
    normalized_rms,
    support_widths,
    triangularity_score,
)
from roguewave.errors import DegenerateSpectrum, GridMismatch, NotConverged, ZeroReference
from roguewave.signal_model import ComplexField, Grid1D, SolitonKind, evaluate_field
from roguewave.wavelet import DEFAULT_SCALES, haar_cwt

GRID = Grid1D()
DX = GRID.dx
P, AP = SolitonKind.PEREGRINE, SolitonKind.AKHMEDIEV_PEREGRINE


def scaleogram(kind, t, x0=0.0, grid=GRID):
    return envelope_scaleogram(evaluate_field(kind, grid, t, x0))


def deviation_field(dev, grid=GRID, t=0.0):
    """Real field whose modulus is 1 + dev (dev >= -1)."""
    return ComplexField(grid, t, 1.0 + dev)


class TestTriangularity:
    def test_peregrine_t0_is_triangular(self):
        assert triangularity_score(scaleogram(P, 0.0)) >= 0.8

    def test_noise_margin(self):
        rogue = triangularity_score(scaleogram(P, 0.0))
        scores = [
            triangularity_score(haar_cwt(np.random.default_rng(s).uniform(-1, 1, 1024), x=GRID.x))
            for s in range(50)
        ]
        assert rogue - np.median(scores) >= 0.2

    def test_in_unit_interval(self):
        for kind in SolitonKind:
            for t in (-3.0, 0.0, 1.0, 3.0):
                assert 0.0 <= triangularity_score(scaleogram(kind, t)) <= 1.0

    def test_zero_scaleogram_is_degenerate(self):
        with pytest.raises(DegenerateSpectrum):
            triangularity_score(haar_cwt(np.zeros(64)))
        with pytest.raises(DegenerateSpectrum):
            locate_apex(haar_cwt(np.zeros(64)))

    def test_linear_band_scores_one(self):
        # a single spike: each row's support grows as 2a - 1 samples
        s = np.zeros(512)
        s[256] = 1.0
        sg = haar_cwt(s)
        np.testing.assert_allclose(support_widths(sg), (2 * np.arange(1, 33)) * sg.dx)
        assert triangularity_score(sg) == pytest.approx(1.0, abs=1e-12)

    def test_single_scale_scores_zero(self):
        sg = envelope_scaleogram(evaluate_field(P, GRID, 0.0), scales=[4])
        assert triangularity_score(sg) == 0.0


class TestApex:
    def test_centered_t0(self):
        for kind in SolitonKind:
            apex, conf = locate_apex(scaleogram(kind, 0.0))
            assert abs(apex) <= 2 * DX
            assert 0.0 <= conf <= 1.0

    def test_shifted_center(self):
        apex, _ = locate_apex(scaleogram(P, 0.0, x0=5.0))
        assert abs(apex - 5.0) <= 4 * DX

    def test_ap_t3_coarse(self):
        apex, _ = locate_apex(scaleogram(AP, 3.0))
        assert abs(apex) <= 1.0

    def test_confidence_higher_for_localized_event(self):
        _, rogue = locate_apex(scaleogram(P, 0.0))
        _, noise = locate_apex(haar_cwt(np.random.default_rng(0).uniform(-1, 1, 1024), x=GRID.x))
        assert rogue > noise

    def test_within_grid_extent(self):
        for x0 in (-15.0, 0.0, 12.5):
            r = detect(evaluate_field(P, GRID, 1.0, x0))
            assert GRID.x_min <= r.apex_x < GRID.x_max


class TestDetect:
    def test_background_no_alarm(self):
        bg = ComplexField(GRID, 0.4, np.exp(0.4j) * np.ones(GRID.n_points))
        r = detect(bg)
        assert not r.alarm and r.triangularity == 0.0 and r.degenerate
        assert GRID.x_min <= r.apex_x < GRID.x_max

    @pytest.mark.parametrize("kind", list(SolitonKind))
    def test_analytic_t0_alarms(self, kind):
        r = detect(evaluate_field(kind, GRID, 0.0))
        assert r.alarm and not r.degenerate
        assert r.threshold_used == DEFAULT_THRESHOLD

    def test_alarm_matches_threshold(self):
        f = evaluate_field(P, GRID, 3.0)
        score = detect(f).triangularity
        assert detect(f, threshold=score).alarm
        assert not detect(f, threshold=np.nextafter(score, 1.0)).alarm

    @pytest.mark.parametrize("thr", [0.0, 1.0, -0.2, 1.5])
    def test_threshold_range(self, thr):
        with pytest.raises(ValueError):
            detect(evaluate_field(P, GRID, 0.0), threshold=thr)

    def test_time_recorded(self):
        assert detect(evaluate_field(P, GRID, -2.0)).time == -2.0

    def test_recovered_t3_agrees_with_analytic(self):
        f = evaluate_field(P, GRID, 3.0)
        expected = detect(f).alarm
        agree = 0
        for seed in range(50):
            try:
                res = recover(sample(f, make_plan(1024, 64, seed)), GRID)
            except NotConverged as exc:
                res = exc.result
            agree += detect(res.field).alarm == expected
        assert agree >= 45


class TestInvariants:
    @settings(max_examples=25, deadline=None)
    @given(st.floats(min_value=1e-3, max_value=1.0))
    def test_scale_invariance(self, c):
        dev = evaluate_field(P, GRID, 1.5).modulus - 1.0
        a, b = detect(deviation_field(dev)), detect(deviation_field(c * dev))
        assert b.triangularity == pytest.approx(a.triangularity, abs=1e-9)
        assert b.apex_x == pytest.approx(a.apex_x, abs=1e-9)
        assert b.alarm == a.alarm

    @pytest.mark.parametrize("c", [2.0**-k for k in range(1, 8)])
    def test_scale_invariance_exact_for_powers_of_two(self, c):
        dev = evaluate_field(P, GRID, 0.0).modulus - 1.0
        sg_a = haar_cwt(dev, x=GRID.x)
        sg_b = haar_cwt(c * dev, x=GRID.x)
        assert triangularity_score(sg_a) == triangularity_score(sg_b)
        assert locate_apex(sg_a)[0] == locate_apex(sg_b)[0]

    @pytest.mark.parametrize("k", [-40, -7, 13, 128])
    def test_translation_equivariance(self, k):
        base = detect(evaluate_field(P, GRID, 0.0)).apex_x
        moved = detect(evaluate_field(P, GRID, 0.0, k * DX)).apex_x
        assert abs(moved - (base + k * DX)) <= 2 * DX

    @pytest.mark.parametrize("kind", list(SolitonKind))
    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0, 3.0])
    def test_time_symmetry(self, kind, t):
        a = detect(evaluate_field(kind, GRID, t))
        b = detect(evaluate_field(kind, GRID, -t))
        assert abs(a.triangularity - b.triangularity) <= 1e-12
        assert abs(a.apex_x - b.apex_x) <= DX

    def test_early_detection_ordering(self):
        scores = [detect(evaluate_field(P, GRID, t)).triangularity for t in (-3.0, -2.0, -1.0, 0.0)]
        assert all(b >= a for a, b in zip(scores, scores[1:])), scores


def test_calibration_constants_reproduce():
    cal = calibrate()
    assert cal.noise_median == NOISE_MEDIAN_SCORE
    assert cal.rogue_t3_score == ROGUE_T3_SCORE
    assert cal.threshold == DEFAULT_THRESHOLD
    assert len(cal.noise_scores) == 50
    assert NOISE_MEDIAN_SCORE < DEFAULT_THRESHOLD < ROGUE_T3_SCORE


def test_default_scales():
    assert tuple(DEFAULT_SCALES) == tuple(range(1, 33))


class TestNormalizedRms:
    f = evaluate_field(P, GRID, 0.0)

    def test_identical(self):
        assert normalized_rms(self.f, self.f) == 0.0

    def test_double(self):
        a = ComplexField(GRID, 0.0, 2 * self.f.values)
        assert normalized_rms(a, self.f) == pytest.approx(1.0, rel=1e-15)

    def test_reference_is_second_argument(self):
        a = ComplexField(GRID, 0.0, 2 * self.f.values)
        assert normalized_rms(self.f, a) == pytest.approx(0.5, rel=1e-15)

    def test_grid_mismatch(self):
        other = evaluate_field(P, Grid1D(1024, -10, 10), 0.0)
        with pytest.raises(GridMismatch):
            normalized_rms(other, self.f)

    def test_time_mismatch(self):
        with pytest.raises(GridMismatch):
            normalized_rms(evaluate_field(P, GRID, 1.0), self.f)

    def test_zero_reference(self):
        with pytest.raises(ZeroReference):
            normalized_rms(self.f, ComplexField(GRID, 0.0, np.zeros(GRID.n_points)))
