"""Numerical certification of the mask-synthesis guarantees.

Two facts get certified empirically: (i) the cosine-threshold rule activates
half the elements asymptotically, and (ii) the best ON/OFF mask always
achieves a normalized mainlobe gain of at least 1/pi^2, regardless of the
phase sequence.  An exhaustive enumerator serves as the oracle for the exact
polynomial-time maximizer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import Aperture, ReflectionCoefficients, array_factor
from .errors import ValidationError
from .masks import (
    SteeringTask,
    ideal_continuous_weights,
    ideal_phase_profile,
    multibeam_mask,
    multibeam_profile,
    quantize_bipolar,
    select_psi,
    single_beam_mask,
    thinning_ratio,
)

GAIN_BOUND = 1.0 / math.pi**2

_BRUTEFORCE_MAX_M = 20
_BRUTEFORCE_CHUNK = 1 << 16


def bruteforce_opt_mask(phases: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Exhaustive maximizer of |sum_m b_m e^{-j phi_m}| over all 2^M masks.

    Returns (mask bits, s_star, gamma_star).  Ties break toward the
    lexicographically smallest mask (b_0 first).
    """
    phases = np.asarray(phases, dtype=float)
    m = phases.size
    if m < 1:
        raise ValidationError("phases must be non-empty")
    if m > _BRUTEFORCE_MAX_M:
        raise ValidationError(
            f"brute force is capped at M={_BRUTEFORCE_MAX_M} (2^M enumeration); "
            "use breakpoint_opt_mask for larger apertures"
        )
    phasors = np.exp(-1j * phases)
    # b_0 maps to the most significant bit so that ascending index order is
    # lexicographic order of the bit tuple.
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)

    def chunk_scores(start: int) -> tuple[np.ndarray, np.ndarray]:
        idx = np.arange(start, min(start + _BRUTEFORCE_CHUNK, 1 << m), dtype=np.int64)
        bits = ((idx[:, None] >> shifts[None, :]) & 1).astype(float)
        return idx, np.abs(bits @ phasors)

    starts = range(0, 1 << m, _BRUTEFORCE_CHUNK)
    s_star = max(float(np.max(chunk_scores(start)[1])) for start in starts)
    best_idx = None
    for start in starts:
        idx, s = chunk_scores(start)
        tied = np.nonzero(s >= s_star - 1e-12)[0]
        if tied.size:
            best_idx = int(idx[tied[0]])
            break
    mask = ((best_idx >> shifts) & 1).astype(int)
    s_star = float(abs(mask @ phasors))
    return mask, s_star, (s_star / m) ** 2


def _rotation_breakpoints(phases: np.ndarray) -> np.ndarray:
    """Rotations at which some cos(phi_m + psi) crosses zero, sorted in [0, 2pi)."""
    cands = np.concatenate(
        [
            (np.pi / 2 - phases) % (2 * np.pi),
            (3 * np.pi / 2 - phases) % (2 * np.pi),
        ]
    )
    return np.unique(cands)


def breakpoint_opt_mask(phases: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Exact optimum of |sum b_m e^{-j phi_m}| via the thresholded-mask family.

    The optimal mask is always of the form b_m = 1{cos(phi_m + psi) >= 0} for
    some rotation psi; the mask only changes at the <= 2M rotations where a
    cosine crosses zero, so evaluating one candidate per constant piece (plus
    the breakpoints themselves for the boundary-inclusive tie rule) covers
    every achievable thresholded mask.
    """
    phases = np.asarray(phases, dtype=float)
    if phases.size < 1:
        raise ValidationError("phases must be non-empty")
    phasors = np.exp(-1j * phases)
    bps = _rotation_breakpoints(phases)
    mids = (bps + np.diff(np.concatenate([bps, [bps[0] + 2 * np.pi]])) / 2) % (2 * np.pi)
    best_s = -1.0
    best_mask = None
    for psi in np.concatenate([bps, mids]):
        mask = (np.cos(phases + psi) >= 0.0).astype(int)
        s = abs(np.dot(mask, phasors))
        if s > best_s:
            best_s = s
            best_mask = mask
    m = phases.size
    return best_mask, float(best_s), (best_s / m) ** 2


def optimal_bipolar(phases: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Best rotated bipolar mask: max over psi of |sum sgn(cos(phi_m+psi)) e^{-j phi_m}|."""
    phases = np.asarray(phases, dtype=float)
    if phases.size < 1:
        raise ValidationError("phases must be non-empty")
    phasors = np.exp(-1j * phases)
    bps = _rotation_breakpoints(phases)
    mids = (bps + np.diff(np.concatenate([bps, [bps[0] + 2 * np.pi]])) / 2) % (2 * np.pi)
    best_s = -1.0
    best_w = None
    for psi in np.concatenate([[0.0], bps, mids]):
        w = np.where(np.cos(phases + psi) >= 0.0, 1, -1)
        s = abs(np.dot(w, phasors))
        if s > best_s:
            best_s = s
            best_w = w
    m = phases.size
    return best_w, float(best_s), (best_s / m) ** 2


@dataclass(frozen=True)
class BoundReport:
    """Outcome of a randomized certification run of the 1/pi^2 gain bound."""

    trials: int
    min_gamma_star: float
    bound: float
    violations: int
    witness_phases: tuple[float, ...]
    witness_bits: str
    seed: int
    rotation_mean_amplitude: float

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "min_gamma_star": self.min_gamma_star,
            "bound": self.bound,
            "violations": self.violations,
            "witness_phases": list(self.witness_phases),
            "witness_bits": self.witness_bits,
            "seed": self.seed,
            "rotation_mean_amplitude": self.rotation_mean_amplitude,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def rotation_average(phases: np.ndarray, samples: int = 4096) -> float:
    """Average over rotations of (1/M) sum_m [cos(phi_m + psi)]_+.

    Equals 1/pi for every phase sequence; the bound follows because the
    maximum over rotations is at least this average.
    """
    phases = np.asarray(phases, dtype=float)
    psi = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    f = np.maximum(np.cos(phases[None, :] + psi[:, None]), 0.0).mean(axis=1)
    return float(f.mean())


def verify_gain_bound(
    trials: int,
    m_range: tuple[int, int] = (8, 14),
    seed: int = 0,
) -> BoundReport:
    """Draw random steering geometries and certify gamma* >= 1/pi^2 on each.

    Per-trial generators are derived from (seed, trial index), so the trial
    inputs do not depend on execution order.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    m_lo, m_hi = m_range
    if not 1 <= m_lo <= m_hi:
        raise ValidationError("m_range must satisfy 1 <= lo <= hi")
    min_gamma = math.inf
    witness_phases: np.ndarray | None = None
    witness_mask: np.ndarray | None = None
    violations = 0
    rot_sum = 0.0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        theta_i = rng.uniform(-90.0, 90.0)
        theta_t = rng.uniform(-90.0, 90.0)
        ratio = rng.uniform(0.25, 1.0)
        m = int(rng.integers(m_lo, m_hi + 1))
        aperture = Aperture(m, ratio, 1.0)
        phases = ideal_phase_profile(aperture, theta_i, theta_t).phases
        mask, _, gamma = breakpoint_opt_mask(phases)
        rot_sum += rotation_average(phases, samples=1024)
        if gamma < GAIN_BOUND - 1e-12:
            violations += 1
        if gamma < min_gamma:
            min_gamma = gamma
            witness_phases = phases
            witness_mask = mask
    return BoundReport(
        trials=trials,
        min_gamma_star=min_gamma,
        bound=GAIN_BOUND,
        violations=violations,
        witness_phases=tuple(float(p) for p in witness_phases),
        witness_bits="".join(str(int(b)) for b in witness_mask),
        seed=seed,
        rotation_mean_amplitude=rot_sum / trials,
    )


def thinning_convergence(
    theta_i: float,
    theta_t: float,
    d0: float,
    wavelength: float,
    m_values: list[int],
) -> list[tuple[int, float]]:
    """Thinning ratio of the psi=0 mask for each aperture size in m_values."""
    out = []
    for m in m_values:
        aperture = Aperture(m, d0, wavelength)
        mask = single_beam_mask(aperture, theta_i, theta_t)
        out.append((m, thinning_ratio(mask)))
    return out


def loss_report(aperture: Aperture, task: SteeringTask) -> dict[str, dict[str, float]]:
    """Normalized gain at the target(s) for each control scheme, with dB loss
    relative to the ideal configurable baseline.

    Schemes: all_on, onoff_psi0, onoff_best_psi, bipolar, ideal.  For
    multi-target tasks the reported gain is the minimum over targets.
    """
    m2 = aperture.element_count**2

    def min_gain(coeffs) -> float:
        return min(
            abs(array_factor(aperture, coeffs, angle, task.incidence)) ** 2 / m2
            for angle in task.target_angles
        )

    profile = multibeam_profile(aperture, task)
    schemes: dict[str, float] = {}
    schemes["all_on"] = min_gain(ReflectionCoefficients.all_on(aperture.element_count))
    schemes["onoff_psi0"] = min_gain(multibeam_mask(profile))
    if len(task.targets) == 1:
        phases = ideal_phase_profile(
            aperture, task.incidence, task.target_angles[0]
        ).phases
        _, s_star, gamma_star = breakpoint_opt_mask(phases)
        schemes["onoff_best_psi"] = gamma_star
        schemes["bipolar"] = min_gain(
            quantize_bipolar(ideal_phase_profile(aperture, task.incidence, task.target_angles[0]))
        )
    else:
        psi_star, _ = select_psi(aperture, task, grid_size=64)
        schemes["onoff_best_psi"] = min_gain(multibeam_mask(profile, psi_star))
        schemes["bipolar"] = min_gain(
            ReflectionCoefficients.bipolar(np.where(np.real(profile) >= 0.0, 1, -1))
        )
    ideal_gain = min_gain(ideal_continuous_weights(aperture, task))
    schemes["ideal"] = ideal_gain

    report = {}
    for name, gain in schemes.items():
        loss = math.inf if gain <= 0 else 10.0 * math.log10(ideal_gain / gain)
        report[name] = {"gain": gain, "loss_db": loss}
    return report


def worst_case_loss_sweep(
    element_count: int = 64,
    spacing_over_wavelength: float = 0.5,
    resolution: float = 0.01,
    sine_sum_max: float = 2.0,
) -> dict[str, float]:
    """Worst-case dB loss of the best ON/OFF and best bipolar masks vs the
    ideal continuous reflector, swept over the sine-sum variable.

    Both schemes use their best threshold rotation at every sweep point;
    with a fixed rotation the loss is unbounded at commensurate phase
    increments.
    """
    m = element_count
    x = (np.arange(m)[::-1] - (m - 1) / 2.0) * spacing_over_wavelength
    worst_onoff = 0.0
    worst_bipolar = 0.0
    n_steps = int(round(sine_sum_max / resolution))
    for i in range(n_steps + 1):
        s = i * resolution
        phases = 2.0 * np.pi * x * s
        _, s_on, _ = breakpoint_opt_mask(phases)
        _, s_bip, _ = optimal_bipolar(phases)
        worst_onoff = max(worst_onoff, -20.0 * math.log10(s_on / m))
        worst_bipolar = max(worst_bipolar, -20.0 * math.log10(s_bip / m))
    return {
        "worst_onoff_loss_db": worst_onoff,
        "worst_bipolar_loss_db": worst_bipolar,
        "gap_db": worst_onoff - worst_bipolar,
    }
