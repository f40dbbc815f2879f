"""Post-processing of measured azimuthal power scans.

Scans arrive as CSV (theta_deg, power_dbm).  Background correction subtracts
the mount-only scan in linear power and clamps at zero; normalization divides
by the pattern maximum so measured and theoretical patterns can be compared
without absolute calibration.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .core import GAIN_DB_FLOOR, AngularPattern
from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class MeasurementScan:
    incidence: float
    theta_deg: np.ndarray
    power_dbm: np.ndarray
    meta: str = ""

    def __post_init__(self):
        theta = np.asarray(self.theta_deg, dtype=float)
        power = np.asarray(self.power_dbm, dtype=float)
        if theta.size < 2:
            raise ValidationError("a scan needs at least 2 samples")
        if np.any(np.diff(theta) <= 0):
            raise ValidationError("scan angles must be strictly increasing")
        if not np.all(np.isfinite(power)):
            raise ValidationError("scan powers must be finite")
        object.__setattr__(self, "theta_deg", theta)
        object.__setattr__(self, "power_dbm", power)

    def __len__(self) -> int:
        return self.theta_deg.size


def load_scan(text: str, incidence: float = 0.0, meta: str = "") -> MeasurementScan:
    """Parse a CSV scan with header theta_deg,power_dbm."""
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise ParseError("empty scan file")
    header = [h.strip().lower() for h in rows[0]]
    if header[:2] != ["theta_deg", "power_dbm"]:
        raise ParseError("expected header 'theta_deg,power_dbm'", line=1)
    thetas: list[float] = []
    powers: list[float] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < 2:
            raise ParseError(f"expected 2 columns, got {len(row)}", line=lineno)
        try:
            theta = float(row[0])
            power = float(row[1])
        except ValueError:
            raise ParseError(f"non-numeric row {row!r}", line=lineno) from None
        if thetas and theta == thetas[-1]:
            raise ParseError(f"duplicate angle {theta}", line=lineno)
        if thetas and theta < thetas[-1]:
            raise ParseError(
                f"angles must be strictly increasing (got {theta} after {thetas[-1]})",
                line=lineno,
            )
        thetas.append(theta)
        powers.append(power)
    if len(thetas) < 2:
        raise ParseError("scan must contain at least 2 data rows")
    return MeasurementScan(incidence, np.array(thetas), np.array(powers), meta)


def _dbm_to_mw(dbm: np.ndarray) -> np.ndarray:
    return 10.0 ** (np.asarray(dbm, dtype=float) / 10.0)


def background_subtract(
    meas: MeasurementScan, mount: MeasurementScan
) -> list[tuple[float, float]]:
    """Per angle, max{P_meas - P_mount, 0} in milliwatts.

    The grids must match exactly; backgrounds are never resampled.
    """
    if len(meas) != len(mount) or np.any(meas.theta_deg != mount.theta_deg):
        raise ValidationError(
            "measurement and mount scans must share the exact same angle grid; "
            "re-measure with aligned sweeps rather than interpolating backgrounds"
        )
    corrected = np.maximum(_dbm_to_mw(meas.power_dbm) - _dbm_to_mw(mount.power_dbm), 0.0)
    return list(zip(meas.theta_deg.tolist(), corrected.tolist()))


def normalize_pattern(linear: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Divide by the pattern maximum and convert to dB (floor at -60 dB)."""
    if not linear:
        raise ValidationError("empty pattern")
    power = np.array([p for _, p in linear], dtype=float)
    peak = power.max()
    if peak <= 0.0:
        raise ValidationError("no reflector signal above background")
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(power / peak)
    db = np.maximum(db, GAIN_DB_FLOOR)
    return [(theta, float(d)) for (theta, _), d in zip(linear, db)]


@dataclass(frozen=True)
class TargetComparison:
    theta: float
    found: bool
    angle_err_deg: float | None
    level_err_db: float | None


@dataclass(frozen=True)
class ComparisonReport:
    targets: tuple[TargetComparison, ...]
    rms_db: float
    floor_db: float

    def to_dict(self) -> dict:
        return {
            "targets": [
                {
                    "theta": t.theta,
                    "angle_err_deg": t.angle_err_deg,
                    "level_err_db": t.level_err_db,
                    "found": t.found,
                }
                for t in self.targets
            ],
            "rms_db": self.rms_db,
            "floor_db": self.floor_db,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _local_peaks(values: np.ndarray) -> np.ndarray:
    """Indices of samples >= both neighbors (endpoints compare one-sided)."""
    higher_left = np.r_[True, values[1:] >= values[:-1]]
    higher_right = np.r_[values[:-1] >= values[1:], True]
    return np.nonzero(higher_left & higher_right)[0]


def _nearest_peak(
    theta: np.ndarray, values: np.ndarray, target: float, window: float
) -> int | None:
    peaks = _local_peaks(values)
    peaks = peaks[np.abs(theta[peaks] - target) <= window]
    if peaks.size == 0:
        return None
    return int(peaks[np.argmin(np.abs(theta[peaks] - target))])


def compare(
    measured_db: list[tuple[float, float]],
    theory: AngularPattern,
    targets: list[float],
    floor_db: float = GAIN_DB_FLOOR,
    peak_window: float = 10.0,
) -> ComparisonReport:
    """Score a normalized measured pattern against a theoretical pattern.

    The theory is resampled onto the measured grid by linear interpolation in
    dB, then peak-normalized to 0 dB so both sides are relative pattern
    shapes (the measured pattern carries no absolute calibration).  For each
    declared target, the nearest local peak of each pattern within
    +-peak_window degrees is located; a missing peak is reported, not raised.
    The RMS error covers angles where both patterns exceed floor_db.
    """
    if not measured_db:
        raise ValidationError("empty measured pattern")
    theta = np.array([t for t, _ in measured_db], dtype=float)
    meas = np.array([v for _, v in measured_db], dtype=float)
    theory_db = np.interp(theta, theory.theta_grid, theory.gain_db)
    theory_db = np.maximum(theory_db - theory_db.max(), GAIN_DB_FLOOR)

    results = []
    for target in targets:
        i_meas = _nearest_peak(theta, meas, target, peak_window)
        i_theo = _nearest_peak(theta, theory_db, target, peak_window)
        if i_meas is None or i_theo is None:
            results.append(TargetComparison(target, False, None, None))
            continue
        results.append(
            TargetComparison(
                target,
                True,
                float(theta[i_meas] - theta[i_theo]),
                float(meas[i_meas] - theory_db[i_theo]),
            )
        )

    both = (meas > floor_db) & (theory_db > floor_db)
    if np.any(both):
        rms = float(np.sqrt(np.mean((meas[both] - theory_db[both]) ** 2)))
    else:
        rms = 0.0
    return ComparisonReport(tuple(results), rms, floor_db)


def normalized_to_csv(pattern_db: list[tuple[float, float]]) -> str:
    buf = io.StringIO()
    buf.write("theta_deg,gain_db\n")
    for theta, db in pattern_db:
        buf.write(f"{theta:.6g},{db:.6f}\n")
    return buf.getvalue()
