"""1-bit ON/OFF mask synthesis from ideal continuous phase profiles.

The closed-form design path: build the compensating phase ramp for the target
departure angle, then threshold its cosine to get an ON/OFF metallization
pattern.  Multi-beam masks superpose one ramp per target before thresholding.
A global offset psi rotates the threshold boundary to recover gain lost to
unlucky boundary alignment on finite apertures.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import Aperture, ReflectionCoefficients, array_factor
from .errors import ValidationError

MASK_FILE_VERSION = 1


@dataclass(frozen=True)
class SteeringTask:
    """Incidence angle, weighted target departure angles and global offset psi."""

    incidence: float
    targets: tuple[tuple[float, complex], ...]
    psi: float = 0.0

    def __post_init__(self):
        if not -90.0 <= self.incidence <= 90.0:
            raise ValidationError("incidence must lie in [-90, 90] degrees")
        targets = tuple((float(a), complex(w)) for a, w in self.targets)
        if not targets:
            raise ValidationError("targets must be non-empty")
        for angle, _ in targets:
            if not -90.0 <= angle <= 90.0:
                raise ValidationError("target angles must lie in [-90, 90] degrees")
        if all(w == 0 for _, w in targets):
            raise ValidationError("at least one target weight must be nonzero")
        if not 0.0 <= self.psi < 2.0 * math.pi:
            raise ValidationError("psi must lie in [0, 2*pi)")
        object.__setattr__(self, "targets", targets)

    @classmethod
    def single(cls, incidence: float, target: float, psi: float = 0.0) -> "SteeringTask":
        return cls(incidence, ((target, 1.0 + 0j),), psi)

    @property
    def target_angles(self) -> list[float]:
        return [a for a, _ in self.targets]


@dataclass(frozen=True)
class PhaseProfile:
    """Affine per-element phases phi_m = increment*m + offset (radians)."""

    phases: np.ndarray
    increment: float
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "phases", np.asarray(self.phases, dtype=float))

    def __len__(self) -> int:
        return self.phases.size


def ideal_phase_profile(aperture: Aperture, theta_i: float, theta_t: float) -> PhaseProfile:
    """Compensating phases phi_m = k x_m (sin theta_t + sin theta_i)."""
    for name, val in (("theta_i", theta_i), ("theta_t", theta_t)):
        if not -90.0 <= val <= 90.0:
            raise ValidationError(f"{name} must lie in [-90, 90] degrees")
    sine_sum = math.sin(math.radians(theta_t)) + math.sin(math.radians(theta_i))
    phases = aperture.wavenumber * aperture.positions * sine_sum
    increment = -aperture.wavenumber * aperture.spacing * sine_sum
    # x_m decreases with m, so phi_m = increment*m + offset with
    # offset = -increment*(M-1)/2.
    offset = -increment * (aperture.element_count - 1) / 2.0
    return PhaseProfile(phases, increment, offset)


def quantize_bipolar(profile: PhaseProfile) -> ReflectionCoefficients:
    """Nearest bipolar (+-1) state: +1 where cos(phi_m) >= 0, else -1."""
    signs = np.where(np.cos(profile.phases) >= 0.0, 1, -1)
    return ReflectionCoefficients.bipolar(signs)


def single_beam_mask(
    aperture: Aperture, theta_i: float, theta_t: float, psi: float = 0.0
) -> ReflectionCoefficients:
    """ON/OFF mask b_m = 1{cos(phi_m + psi) >= 0}."""
    if not 0.0 <= psi < 2.0 * math.pi:
        raise ValidationError("psi must lie in [0, 2*pi)")
    profile = ideal_phase_profile(aperture, theta_i, theta_t)
    bits = (np.cos(profile.phases + psi) >= 0.0).astype(int)
    return ReflectionCoefficients.binary(bits)


def multibeam_profile(aperture: Aperture, task: SteeringTask) -> np.ndarray:
    """Complex superposition s_m of one ideal phase ramp per weighted target."""
    s = np.zeros(aperture.element_count, dtype=complex)
    for angle, weight in task.targets:
        phases = ideal_phase_profile(aperture, task.incidence, angle).phases
        s += weight * np.exp(1j * phases)
    return s


def multibeam_mask(profile: np.ndarray, psi: float = 0.0) -> ReflectionCoefficients:
    """Threshold the superposed profile: b_m = 1{Re(s_m e^{j psi}) >= 0}."""
    profile = np.asarray(profile, dtype=complex)
    if profile.size == 0:
        raise ValidationError("profile must be non-empty")
    bits = (np.real(profile * np.exp(1j * psi)) >= 0.0).astype(int)
    return ReflectionCoefficients.binary(bits)


def thinning_ratio(mask: ReflectionCoefficients) -> float:
    """ON fraction of a binary mask: (1/M) sum b_m."""
    if mask.kind != "binary":
        raise ValidationError("thinning ratio requires a binary mask")
    return float(np.sum(mask.values.real)) / len(mask)


def synthesize_mask(aperture: Aperture, task: SteeringTask) -> ReflectionCoefficients:
    """ON/OFF mask for a steering task (single- or multi-target) at its psi."""
    return multibeam_mask(multibeam_profile(aperture, task), task.psi)


def _min_target_gain(
    aperture: Aperture, task: SteeringTask, coeffs: ReflectionCoefficients
) -> float:
    m2 = aperture.element_count**2
    return min(
        abs(array_factor(aperture, coeffs, angle, task.incidence)) ** 2 / m2
        for angle in task.target_angles
    )


def select_psi(aperture: Aperture, task: SteeringTask, grid_size: int = 64) -> tuple[float, float]:
    """Pick psi from a uniform grid of ``grid_size`` candidates in [0, 2*pi).

    Maximizes the minimum over targets of the normalized gain; ties break
    toward the smallest grid index.  Returns (psi_star, score_db).
    """
    if grid_size < 1:
        raise ValidationError("grid_size must be >= 1")
    profile = multibeam_profile(aperture, task)
    best_psi = 0.0
    best_gain = -1.0
    for i in range(grid_size):
        psi = 2.0 * math.pi * i / grid_size
        mask = multibeam_mask(profile, psi)
        gain = _min_target_gain(aperture, task, mask)
        if gain > best_gain + 1e-15:
            best_gain = gain
            best_psi = psi
    score_db = 10.0 * math.log10(best_gain) if best_gain > 0 else -math.inf
    return best_psi, score_db


def ideal_continuous_weights(aperture: Aperture, task: SteeringTask) -> ReflectionCoefficients:
    """Ideal configurable-reflector baseline for a steering task.

    Single target: unit-modulus phases e^{j phi_m} (unit gain at the target).
    Multiple targets: the superposed ramp scaled to split power equally,
    s_m / sqrt(sum |alpha_l|^2).  The multi-beam weights are a theoretical
    reference and may exceed unit modulus on some elements.
    """
    s = multibeam_profile(aperture, task)
    if len(task.targets) == 1:
        _, w = task.targets[0]
        phasors = s / abs(w)
        return ReflectionCoefficients.continuous(phasors)
    norm = math.sqrt(sum(abs(w) ** 2 for _, w in task.targets))
    return ReflectionCoefficients.arbitrary(s / norm, passive=False)


# ---------------------------------------------------------------------------
# Mask file: the JSON contract between synthesis, simulation and fabrication.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MaskDesign:
    """A synthesized mask together with the geometry and task that produced it."""

    aperture: Aperture
    task: SteeringTask
    bits: str

    def __post_init__(self):
        if len(self.bits) != self.aperture.element_count:
            raise ValidationError("bits length must equal the element count")
        if set(self.bits) - {"0", "1"}:
            raise ValidationError("bits must contain only '0' and '1'")

    @property
    def coefficients(self) -> ReflectionCoefficients:
        return ReflectionCoefficients.binary(int(b) for b in self.bits)

    def to_dict(self) -> dict:
        return {
            "version": MASK_FILE_VERSION,
            "M": self.aperture.element_count,
            "d0_m": self.aperture.spacing,
            "lambda_m": self.aperture.wavelength,
            "theta_i_deg": self.task.incidence,
            "targets": [
                {"theta_deg": a, "weight_re": w.real, "weight_im": w.imag}
                for a, w in self.task.targets
            ],
            "psi_rad": self.task.psi,
            "bits": self.bits,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "MaskDesign":
        try:
            if doc["version"] != MASK_FILE_VERSION:
                raise ValidationError(f"unsupported mask file version {doc['version']}")
            aperture = Aperture(int(doc["M"]), float(doc["d0_m"]), float(doc["lambda_m"]))
            targets = tuple(
                (float(t["theta_deg"]), complex(t["weight_re"], t["weight_im"]))
                for t in doc["targets"]
            )
            task = SteeringTask(float(doc["theta_i_deg"]), targets, float(doc["psi_rad"]))
            return cls(aperture, task, str(doc["bits"]))
        except KeyError as exc:
            raise ValidationError(f"mask file is missing field {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "MaskDesign":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"mask file is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)


def design_mask(aperture: Aperture, task: SteeringTask) -> MaskDesign:
    """Synthesize the ON/OFF mask for a task and package it as a mask design."""
    mask = synthesize_mask(aperture, task)
    return MaskDesign(aperture, task, mask.bits)
