import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from reflectkit.bounds import (
    GAIN_BOUND,
    breakpoint_opt_mask,
    bruteforce_opt_mask,
    loss_report,
    optimal_bipolar,
    rotation_average,
    thinning_convergence,
    verify_gain_bound,
)
from reflectkit.core import Aperture
from reflectkit.errors import ValidationError
from reflectkit.masks import SteeringTask

phase_arrays = arrays(
    dtype=float,
    shape=st.integers(1, 12),
    elements=st.floats(0.0, 2 * math.pi, exclude_max=True),
)


class TestBruteforce:
    def test_three_phasor_example(self):
        # 0, 120, 240 degrees: any single phasor is optimal with |S| = 1;
        # the lexicographically smallest maximizer keeps only the last element
        # (0,0,1 beats 0,1,0 etc. read b_0 first... smallest string is 001).
        mask, s_star, gamma = bruteforce_opt_mask(
            np.array([0.0, 2 * math.pi / 3, 4 * math.pi / 3])
        )
        assert s_star == pytest.approx(1.0, abs=1e-9)
        assert gamma == pytest.approx(1 / 9, abs=1e-9)
        assert mask.tolist() == [0, 0, 1]

    def test_aligned_phases_turn_everything_on(self):
        mask, s_star, gamma = bruteforce_opt_mask(np.zeros(7))
        assert mask.tolist() == [1] * 7
        assert s_star == pytest.approx(7.0)
        assert gamma == pytest.approx(1.0)

    def test_size_cap(self):
        with pytest.raises(ValidationError):
            bruteforce_opt_mask(np.zeros(21))

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            bruteforce_opt_mask(np.array([]))


class TestBreakpoint:
    @given(phases=phase_arrays)
    @settings(max_examples=150, deadline=None)
    def test_matches_bruteforce(self, phases):
        _, s_brute, _ = bruteforce_opt_mask(phases)
        _, s_break, _ = breakpoint_opt_mask(phases)
        assert s_break == pytest.approx(s_brute, abs=1e-9)

    @given(phases=phase_arrays)
    @settings(max_examples=100, deadline=None)
    def test_respects_gain_bound(self, phases):
        _, _, gamma = breakpoint_opt_mask(phases)
        assert gamma >= GAIN_BOUND - 1e-12

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            breakpoint_opt_mask(np.array([]))


class TestOptimalBipolar:
    @given(phases=phase_arrays)
    @settings(max_examples=60, deadline=None)
    def test_beats_psi_zero(self, phases):
        phasors = np.exp(-1j * phases)
        w0 = np.where(np.cos(phases) >= 0.0, 1, -1)
        s0 = abs(np.dot(w0, phasors))
        _, s_best, _ = optimal_bipolar(phases)
        assert s_best >= s0 - 1e-12

    @given(phases=phase_arrays)
    @settings(max_examples=60, deadline=None)
    def test_beats_best_onoff(self, phases):
        # flipping OFF elements to -1 can only be chosen if it helps, and the
        # bipolar family contains both signs of every thresholded mask
        _, s_on, _ = breakpoint_opt_mask(phases)
        _, s_bip, _ = optimal_bipolar(phases)
        assert s_bip >= s_on - 1e-9


class TestRotationAverage:
    @given(phases=phase_arrays)
    @settings(max_examples=60, deadline=None)
    def test_is_one_over_pi(self, phases):
        assert rotation_average(phases) == pytest.approx(1 / math.pi, abs=1e-5)

    def test_high_resolution(self):
        rng = np.random.default_rng(11)
        phases = rng.uniform(0, 2 * math.pi, 50)
        assert rotation_average(phases, samples=100_000) == pytest.approx(
            1 / math.pi, abs=1e-6
        )


class TestVerifyGainBound:
    def test_no_violations_and_reproducible(self):
        a = verify_gain_bound(40, seed=7)
        b = verify_gain_bound(40, seed=7)
        assert a == b
        assert a.violations == 0
        assert a.min_gamma_star >= GAIN_BOUND
        assert a.rotation_mean_amplitude == pytest.approx(1 / math.pi, abs=1e-4)
        assert len(a.witness_bits) == len(a.witness_phases)

    def test_report_serialization(self):
        report = verify_gain_bound(5, seed=0)
        doc = report.to_dict()
        assert doc["bound"] == pytest.approx(1 / math.pi**2)
        assert isinstance(doc["witness_bits"], str)
        report.to_json()

    def test_validation(self):
        with pytest.raises(ValidationError):
            verify_gain_bound(0)
        with pytest.raises(ValidationError):
            verify_gain_bound(5, m_range=(5, 3))


class TestThinningConvergence:
    def test_returns_requested_sizes(self):
        points = thinning_convergence(60.0, -30.0, 2.5e-3, 5e-3, [35, 70, 100])
        assert [m for m, _ in points] == [35, 70, 100]
        for _, eta in points:
            assert 0.0 <= eta <= 1.0

    def test_large_aperture_near_half(self):
        ((_, eta),) = thinning_convergence(60.0, -30.0, 2.5e-3, 5e-3, [2000])
        assert eta == pytest.approx(0.5, abs=0.05)


class TestLossReport:
    def test_single_beam_design_point(self, aperture, single_task):
        report = loss_report(aperture, single_task)
        assert report["ideal"]["loss_db"] == pytest.approx(0.0, abs=1e-9)
        assert report["onoff_psi0"]["loss_db"] == pytest.approx(10.41, abs=0.05)
        assert report["bipolar"]["loss_db"] == pytest.approx(3.92, abs=0.05)
        assert report["onoff_best_psi"]["loss_db"] <= report["onoff_psi0"]["loss_db"]
        # the residual specular lobe steals most of the all-ON energy
        assert report["all_on"]["loss_db"] > 20.0

    def test_dual_beam_design_point(self, aperture, dual_task):
        report = loss_report(aperture, dual_task)
        assert report["onoff_psi0"]["loss_db"] == pytest.approx(6.3, abs=1.0)
        assert report["onoff_best_psi"]["loss_db"] <= report["onoff_psi0"]["loss_db"] + 1e-9

    def test_specular_task_all_schemes_unity(self):
        aperture = Aperture(64, 2.5e-3, 5e-3)
        task = SteeringTask.single(45.0, -45.0)
        report = loss_report(aperture, task)
        for name in ("all_on", "onoff_psi0", "onoff_best_psi", "ideal"):
            assert report[name]["gain"] == pytest.approx(1.0, abs=1e-12), name
