import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reflectkit.core import ReflectionCoefficients, angle_grid, pattern_sweep
from reflectkit.errors import ParseError, ValidationError
from reflectkit.masks import single_beam_mask
from reflectkit.measure import (
    MeasurementScan,
    background_subtract,
    compare,
    load_scan,
    normalize_pattern,
    normalized_to_csv,
)


def make_scan(theta, dbm):
    lines = ["theta_deg,power_dbm"] + [f"{t},{p}" for t, p in zip(theta, dbm)]
    return load_scan("\n".join(lines))


def theory_pattern(aperture, grid=None):
    mask = single_beam_mask(aperture, 45.0, -10.0)
    return pattern_sweep(aperture, mask, 45.0, grid if grid is not None else angle_grid(-90, 0, 1.0))


class TestLoadScan:
    def test_parses_simple_scan(self):
        scan = load_scan("theta_deg,power_dbm\n-10,-42.5\n0,-55\n10,-60\n")
        assert len(scan) == 3
        assert scan.theta_deg.tolist() == [-10.0, 0.0, 10.0]

    def test_skips_blank_lines(self):
        scan = load_scan("theta_deg,power_dbm\n-10,-42\n\n0,-50\n")
        assert len(scan) == 2

    def test_bad_header(self):
        with pytest.raises(ParseError, match="line 1"):
            load_scan("angle,power\n0,-50\n1,-51\n")

    def test_empty_file(self):
        with pytest.raises(ParseError):
            load_scan("")

    def test_missing_column_reports_line(self):
        with pytest.raises(ParseError, match="line 3"):
            load_scan("theta_deg,power_dbm\n0,-50\n5\n")

    def test_non_numeric_reports_line(self):
        with pytest.raises(ParseError, match="line 2"):
            load_scan("theta_deg,power_dbm\nzero,-50\n1,-51\n")

    def test_duplicate_angle(self):
        with pytest.raises(ParseError, match="duplicate"):
            load_scan("theta_deg,power_dbm\n0,-50\n0,-51\n")

    def test_non_monotone(self):
        with pytest.raises(ParseError, match="increasing"):
            load_scan("theta_deg,power_dbm\n5,-50\n0,-51\n")

    def test_too_few_rows(self):
        with pytest.raises(ParseError):
            load_scan("theta_deg,power_dbm\n0,-50\n")


class TestScanInvariants:
    def test_needs_two_samples(self):
        with pytest.raises(ValidationError):
            MeasurementScan(0.0, np.array([1.0]), np.array([-50.0]))

    def test_rejects_non_finite_power(self):
        with pytest.raises(ValidationError):
            MeasurementScan(0.0, np.array([0.0, 1.0]), np.array([-50.0, np.inf]))


class TestBackgroundSubtract:
    def test_clamps_at_zero(self):
        meas = make_scan([0, 1, 2], [-60, -50, -40])
        mount = make_scan([0, 1, 2], [-50, -50, -50])
        out = background_subtract(meas, mount)
        assert all(p >= 0.0 for _, p in out)
        assert out[0][1] == 0.0  # background exceeds signal here

    def test_linear_power_arithmetic(self):
        meas = make_scan([0, 1], [-40, -40])
        mount = make_scan([0, 1], [-43.0103, -43.0103])  # half the power
        out = background_subtract(meas, mount)
        assert out[0][1] == pytest.approx(0.5e-4, rel=1e-4)

    def test_grid_mismatch_rejected(self):
        meas = make_scan([0, 1], [-40, -40])
        mount = make_scan([0, 2], [-50, -50])
        with pytest.raises(ValidationError, match="same angle grid"):
            background_subtract(meas, mount)


class TestNormalize:
    def test_peak_maps_to_zero_db(self):
        out = normalize_pattern([(0.0, 1e-6), (1.0, 4e-6), (2.0, 2e-6)])
        assert dict(out)[1.0] == 0.0
        assert dict(out)[0.0] == pytest.approx(-6.0206, abs=1e-3)

    def test_zeros_hit_the_floor(self):
        out = normalize_pattern([(0.0, 0.0), (1.0, 1.0)])
        assert dict(out)[0.0] == -60.0

    def test_all_zero_rejected(self):
        with pytest.raises(ValidationError, match="no reflector signal"):
            normalize_pattern([(0.0, 0.0), (1.0, 0.0)])

    def test_idempotent(self):
        first = normalize_pattern([(0.0, 1e-5), (1.0, 3e-5), (2.0, 5e-6)])
        linear_again = [(t, 10 ** (db / 10)) for t, db in first]
        second = normalize_pattern(linear_again)
        for (_, a), (_, b) in zip(first, second):
            assert a == pytest.approx(b, abs=1e-12)

    @given(offset_db=st.floats(-30, 30))
    @settings(max_examples=40)
    def test_scale_invariance(self, offset_db):
        theta = [0.0, 1.0, 2.0, 3.0]
        meas_dbm = [-40.0, -45.0, -55.0, -38.0]
        mount_dbm = [-65.0, -64.0, -66.0, -65.0]
        base = normalize_pattern(
            background_subtract(make_scan(theta, meas_dbm), make_scan(theta, mount_dbm))
        )
        shifted = normalize_pattern(
            background_subtract(
                make_scan(theta, [p + offset_db for p in meas_dbm]),
                make_scan(theta, [p + offset_db for p in mount_dbm]),
            )
        )
        for (_, a), (_, b) in zip(base, shifted):
            assert a == pytest.approx(b, abs=1e-9)


class TestCompare:
    def test_theory_against_itself_is_exact(self, aperture):
        theory = theory_pattern(aperture)
        measured = [
            (float(t), float(db)) for t, db in zip(theory.theta_grid, theory.gain_db)
        ]
        # shift so the measured side is peak-normalized like a real scan
        peak = max(db for _, db in measured)
        measured = [(t, db - peak) for t, db in measured]
        report = compare(measured, theory, [-10.0, -45.0])
        for target in report.targets:
            assert target.found
            assert target.angle_err_deg == 0.0
            assert abs(target.level_err_db) < 1e-9
        assert report.rms_db == pytest.approx(0.0, abs=1e-9)

    def test_one_db_deficit_is_reported(self, aperture):
        # synthetic scan embodying the documented ~1 dB shortfall at the
        # steered beam: attenuate the target lobe only, keep the (dominant)
        # specular lobe as the normalization reference
        theory = theory_pattern(aperture)
        theta = theory.theta_grid
        db = theory.gain_db - theory.gain_db.max()
        lobe = np.abs(theta - (-10.0)) <= 3.0
        measured = [
            (float(t), float(v - 1.0) if in_lobe else float(v))
            for t, v, in_lobe in zip(theta, db, lobe)
        ]
        report = compare(measured, theory, [-10.0])
        (target,) = report.targets
        assert target.found
        assert target.angle_err_deg == 0.0
        assert target.level_err_db == pytest.approx(-1.0, abs=1e-9)

    def test_missing_beam_reported_not_raised(self, aperture):
        theory = theory_pattern(aperture)
        flat = [(float(t), -60.0 + 0.001 * i) for i, t in enumerate(range(-90, 1))]
        report = compare(flat, theory, [85.0])
        (target,) = report.targets
        assert not target.found
        assert target.angle_err_deg is None and target.level_err_db is None

    def test_empty_measurement_rejected(self, aperture):
        with pytest.raises(ValidationError):
            compare([], theory_pattern(aperture), [-10.0])

    def test_report_serialization(self, aperture):
        theory = theory_pattern(aperture)
        measured = [
            (float(t), float(db) - float(theory.gain_db.max()))
            for t, db in zip(theory.theta_grid, theory.gain_db)
        ]
        doc = compare(measured, theory, [-10.0]).to_dict()
        assert set(doc) == {"targets", "rms_db", "floor_db"}
        assert set(doc["targets"][0]) == {
            "theta",
            "angle_err_deg",
            "level_err_db",
            "found",
        }


class TestNormalizedCsv:
    def test_header(self):
        text = normalized_to_csv([(0.0, -3.0), (1.0, 0.0)])
        lines = text.strip().splitlines()
        assert lines[0] == "theta_deg,gain_db"
        assert len(lines) == 3
