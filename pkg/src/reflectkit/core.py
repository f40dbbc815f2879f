"""Array-factor model of a passive linear reflecting aperture.

A reflector is a uniform lattice of passive elements along x.  The complex
response toward a departure angle is the coherent sum of per-element phasors,
each gated by that element's reflection coefficient.  Angles are degrees at
every public interface (radians internally); reflection-side departure angles
are negative, so the specular direction is -theta_i.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

# Sentinel floor used whenever a zero power value must be expressed in dB.
GAIN_DB_FLOOR = -60.0

# Denominator threshold below which the Dirichlet ratio switches to its limit.
_DIRICHLET_EPS = 1e-12


def element_positions(element_count: int, spacing: float) -> np.ndarray:
    """Centered element coordinates x_m = ((M-1)/2 - m) * spacing, in meters."""
    if element_count < 1:
        raise ValidationError(f"element_count must be >= 1, got {element_count}")
    if spacing <= 0:
        raise ValidationError(f"spacing must be positive, got {spacing}")
    m = np.arange(element_count)
    return ((element_count - 1) / 2.0 - m) * spacing


@dataclass(frozen=True)
class Aperture:
    """Uniform linear lattice: element count, spacing and wavelength in meters."""

    element_count: int
    spacing: float
    wavelength: float

    def __post_init__(self):
        if self.element_count < 1:
            raise ValidationError("element_count must be >= 1")
        if self.spacing <= 0:
            raise ValidationError("spacing must be positive")
        if self.wavelength <= 0:
            raise ValidationError("wavelength must be positive")

    @property
    def positions(self) -> np.ndarray:
        return element_positions(self.element_count, self.spacing)

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength


@dataclass(frozen=True)
class ReflectionCoefficients:
    """Per-element complex reflection coefficients (the diagonal of the
    scattering matrix).

    kind is one of 'binary' (0/1 amplitude mask), 'bipolar' (+-1 phase mask),
    'continuous' (unit-modulus phase control) or 'complex' (arbitrary
    user-supplied coefficients, passive unless explicitly built otherwise).
    """

    kind: str
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.size == 0:
            raise ValidationError("values must be a non-empty 1-D sequence")
        if self.kind == "binary":
            if not np.all(np.isin(vals, [0.0 + 0j, 1.0 + 0j])):
                raise ValidationError("binary coefficients must all be 0 or 1")
        elif self.kind == "bipolar":
            if not np.all(np.isin(vals, [-1.0 + 0j, 1.0 + 0j])):
                raise ValidationError("bipolar coefficients must all be -1 or +1")
        elif self.kind == "continuous":
            if np.max(np.abs(np.abs(vals) - 1.0)) > 1e-12:
                raise ValidationError("continuous coefficients must have unit modulus")
        elif self.kind != "complex":
            raise ValidationError(f"unknown coefficient kind {self.kind!r}")

    def __len__(self) -> int:
        return self.values.size

    @classmethod
    def binary(cls, bits: Iterable[int]) -> "ReflectionCoefficients":
        return cls("binary", np.asarray(list(bits), dtype=float))

    @classmethod
    def bipolar(cls, signs: Iterable[int]) -> "ReflectionCoefficients":
        return cls("bipolar", np.asarray(list(signs), dtype=float))

    @classmethod
    def continuous(cls, phasors: Sequence[complex]) -> "ReflectionCoefficients":
        return cls("continuous", np.asarray(phasors, dtype=complex))

    @classmethod
    def arbitrary(
        cls, values: Sequence[complex], passive: bool = True
    ) -> "ReflectionCoefficients":
        """Arbitrary complex coefficients.  With passive=True (the default)
        every modulus must stay <= 1; passive=False is reserved for
        theoretical reference weightings that are not element-wise passive
        (e.g. the power-split multi-beam baseline)."""
        vals = np.asarray(values, dtype=complex)
        if passive and vals.size and np.max(np.abs(vals)) > 1.0 + 1e-12:
            raise ValidationError("passive complex coefficients require |v| <= 1")
        return cls("complex", vals)

    @classmethod
    def all_on(cls, count: int) -> "ReflectionCoefficients":
        return cls.binary([1] * count)

    @classmethod
    def all_off(cls, count: int) -> "ReflectionCoefficients":
        return cls.binary([0] * count)

    @property
    def bits(self) -> str:
        """Mask bits as a '0'/'1' string (binary kind only)."""
        if self.kind != "binary":
            raise ValidationError("bits are only defined for binary coefficients")
        return "".join("1" if v.real >= 0.5 else "0" for v in self.values)


def _check_angle(name: str, value: float) -> None:
    if not -90.0 <= value <= 90.0:
        raise ValidationError(f"{name} must lie in [-90, 90] degrees, got {value}")


def array_factor(
    aperture: Aperture,
    coeffs: ReflectionCoefficients,
    theta_t: float,
    theta_i: float,
) -> complex:
    """Coherent phasor sum sum_m c_m exp(-j k x_m (sin theta_t + sin theta_i))."""
    _check_angle("theta_t", theta_t)
    _check_angle("theta_i", theta_i)
    if len(coeffs) != aperture.element_count:
        raise ValidationError(
            f"coefficient length {len(coeffs)} does not match "
            f"aperture element count {aperture.element_count}"
        )
    sine_sum = math.sin(math.radians(theta_t)) + math.sin(math.radians(theta_i))
    phase = aperture.wavenumber * aperture.positions * sine_sum
    return complex(np.sum(coeffs.values * np.exp(-1j * phase)))


def angle_grid(start: float = -90.0, stop: float = 90.0, step: float = 0.5) -> np.ndarray:
    """Departure-angle grid in degrees, inclusive of both endpoints."""
    if step <= 0:
        raise ValidationError("grid step must be positive")
    n = int(round((stop - start) / step))
    grid = start + step * np.arange(n + 1)
    return grid[grid <= stop + 1e-9]


@dataclass(frozen=True)
class AngularPattern:
    """Sampled complex response and normalized power gain over departure angles.

    normalized_gain is |p|^2 / M^2 where M is the scaffold element count, so
    thinned apertures show their gain loss directly.
    """

    theta_grid: np.ndarray
    complex_response: np.ndarray
    normalized_gain: np.ndarray
    incidence: float

    def __post_init__(self):
        theta = np.asarray(self.theta_grid, dtype=float)
        if theta.size == 0:
            raise ValidationError("theta_grid must be non-empty")
        if np.any(np.diff(theta) <= 0):
            raise ValidationError("theta_grid must be strictly increasing")
        if theta[0] < -90.0 - 1e-9 or theta[-1] > 90.0 + 1e-9:
            raise ValidationError("theta_grid entries must lie in [-90, 90]")
        object.__setattr__(self, "theta_grid", theta)
        object.__setattr__(
            self, "complex_response", np.asarray(self.complex_response, dtype=complex)
        )
        object.__setattr__(
            self, "normalized_gain", np.asarray(self.normalized_gain, dtype=float)
        )

    @property
    def gain_db(self) -> np.ndarray:
        """Normalized gain in dB, floored at the -60 dB sentinel."""
        with np.errstate(divide="ignore"):
            db = 10.0 * np.log10(self.normalized_gain)
        return np.maximum(db, GAIN_DB_FLOOR)


def pattern_sweep(
    aperture: Aperture,
    coeffs: ReflectionCoefficients,
    theta_i: float,
    grid: np.ndarray | None = None,
) -> AngularPattern:
    """Evaluate the array factor over a departure-angle grid."""
    _check_angle("theta_i", theta_i)
    if len(coeffs) != aperture.element_count:
        raise ValidationError("coefficient length does not match aperture")
    if grid is None:
        grid = angle_grid()
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValidationError("angle grid must be non-empty")
    if np.any(np.diff(grid) <= 0):
        raise ValidationError("angle grid must be strictly increasing")

    sine_sum = np.sin(np.radians(grid)) + math.sin(math.radians(theta_i))
    phase = aperture.wavenumber * sine_sum[:, None] * aperture.positions[None, :]
    response = np.exp(-1j * phase) @ coeffs.values
    gain = np.abs(response) ** 2 / aperture.element_count**2
    return AngularPattern(grid, response, gain, theta_i)


def uniform_closed_form(
    element_count: int,
    delta: float,
    wavelength: float,
    theta_t: float,
    theta_i: float,
) -> complex:
    """Dirichlet-kernel closed form for an all-ON uniform aperture of period delta.

    Equals the direct phasor sum; the removable singularity at principal
    maxima is handled by an explicit limit branch.
    """
    if element_count < 1:
        raise ValidationError("element_count must be >= 1")
    if delta <= 0:
        raise ValidationError("period delta must be positive")
    if wavelength <= 0:
        raise ValidationError("wavelength must be positive")
    _check_angle("theta_t", theta_t)
    _check_angle("theta_i", theta_i)
    k = 2.0 * math.pi / wavelength
    ksum = k * (math.sin(math.radians(theta_i)) + math.sin(math.radians(theta_t)))
    half = 0.5 * delta * ksum
    m = element_count
    if abs(math.sin(half)) < _DIRICHLET_EPS:
        # at half = n*pi this equals +-M, matching the ratio's limit
        return complex(m * np.exp(-1j * (m - 1) * half))
    # centered coordinates make the phasor sum purely real: the end-anchored
    # form's leading phase factor cancels against the coordinate offset
    return complex(math.sin(m * half) / math.sin(half))


def peak_to_sidelobe(
    pattern: AngularPattern,
    exclusion_windows: Sequence[tuple[float, float]],
) -> float:
    """Highest gain outside the exclusion windows relative to the global peak, dB.

    The caller uses the windows to exclude the mainlobe and (for binary masks)
    the residual specular lobe.
    """
    gain = pattern.normalized_gain
    theta = pattern.theta_grid
    keep = np.ones_like(gain, dtype=bool)
    for lo, hi in exclusion_windows:
        if lo > hi:
            lo, hi = hi, lo
        keep &= ~((theta >= lo) & (theta <= hi))
    if not np.any(keep):
        raise ValidationError("exclusion windows cover the entire angle grid")
    peak = float(np.max(gain))
    if peak <= 0.0:
        raise ValidationError("pattern has no positive gain")
    side = float(np.max(gain[keep]))
    if side <= 0.0:
        return GAIN_DB_FLOOR
    return 10.0 * math.log10(side / peak)


def pattern_to_csv(pattern: AngularPattern) -> str:
    """Serialize to CSV with header theta_deg,re,im,gain_linear,gain_db."""
    buf = io.StringIO()
    buf.write("theta_deg,re,im,gain_linear,gain_db\n")
    db = pattern.gain_db
    for i, theta in enumerate(pattern.theta_grid):
        p = pattern.complex_response[i]
        buf.write(
            f"{theta:.6g},{p.real:.12g},{p.imag:.12g},"
            f"{pattern.normalized_gain[i]:.12g},{db[i]:.6f}\n"
        )
    return buf.getvalue()
