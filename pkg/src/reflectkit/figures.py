"""Pinned parameter sets for the headline theory curves.

Each figure id maps to a set of angular patterns computed from one frozen
parameter table; the CLI and service expose them as CSV downloads so runs
are reproducible from a single identifier.
"""

from __future__ import annotations

import numpy as np

from .core import (
    AngularPattern,
    Aperture,
    ReflectionCoefficients,
    angle_grid,
    pattern_sweep,
)
from .diffraction import design_period, period_design_to_mask
from .errors import ValidationError
from .masks import (
    SteeringTask,
    ideal_continuous_weights,
    multibeam_mask,
    multibeam_profile,
    synthesize_mask,
)

WAVELENGTH = 5e-3
PITCH = 2.5e-3
SCAFFOLD_M = 35

FIGURE_IDS = ("fig3", "fig5", "fig6", "fig7a", "fig7b")


def _dense_aperture() -> Aperture:
    return Aperture(SCAFFOLD_M, PITCH, WAVELENGTH)


def _mask_curves(task: SteeringTask) -> dict[str, ReflectionCoefficients]:
    aperture = _dense_aperture()
    profile = multibeam_profile(aperture, task)
    curves = {
        "onoff": multibeam_mask(profile, task.psi),
        "bipolar": ReflectionCoefficients.bipolar(
            np.where(np.real(profile) >= 0.0, 1, -1)
        ),
        "ideal": ideal_continuous_weights(aperture, task),
    }
    return curves


def reproduce_figure(figure_id: str) -> dict[str, AngularPattern]:
    """Angular patterns for one pinned figure id, on the default 0.5 deg grid."""
    if figure_id not in FIGURE_IDS:
        raise ValidationError(
            f"unknown figure id {figure_id!r}; choose one of {', '.join(FIGURE_IDS)}"
        )
    grid = angle_grid()
    aperture = _dense_aperture()

    if figure_id == "fig3":
        # single-beam masking, 45 deg incidence steered to -10 deg
        task = SteeringTask.single(45.0, -10.0)
        coeffs = _mask_curves(task)
        coeffs["all_on"] = ReflectionCoefficients.all_on(SCAFFOLD_M)
        return {
            name: pattern_sweep(aperture, c, task.incidence, grid)
            for name, c in coeffs.items()
        }

    if figure_id == "fig5":
        # uniform-period steering to -10 deg, all elements active at the
        # designed period
        design = design_period(45.0, -10.0, WAVELENGTH, n=1)
        wide = Aperture(SCAFFOLD_M, design.period, WAVELENGTH)
        task = SteeringTask.single(45.0, -10.0)
        return {
            "uniform_period": pattern_sweep(
                wide, ReflectionCoefficients.all_on(SCAFFOLD_M), 45.0, grid
            ),
            "ideal": pattern_sweep(
                aperture, ideal_continuous_weights(aperture, task), 45.0, grid
            ),
        }

    if figure_id == "fig6":
        # dual-beam mask synthesis at 30 deg incidence
        task = SteeringTask(30.0, ((-7.8, 1.0 + 0j), (-60.0, 1.0 + 0j)))
        coeffs = _mask_curves(task)
        return {
            name: pattern_sweep(aperture, c, task.incidence, grid)
            for name, c in coeffs.items()
        }

    if figure_id == "fig7a":
        # aperture-matched single-beam comparison: the period design snaps to
        # the 35-well scaffold (stride 4, 9 active columns)
        design = design_period(
            45.0, -10.0, WAVELENGTH, n=1, d0=PITCH, wells_per_row=SCAFFOLD_M
        )
        snapped = period_design_to_mask(design, PITCH, SCAFFOLD_M)
        task = SteeringTask.single(45.0, -10.0)
        return {
            "diffraction_snapped": pattern_sweep(
                aperture, snapped.coefficients, 45.0, grid
            ),
            "onoff": pattern_sweep(aperture, synthesize_mask(aperture, task), 45.0, grid),
            "ideal": pattern_sweep(
                aperture, ideal_continuous_weights(aperture, task), 45.0, grid
            ),
        }

    # fig7b: aperture-matched multi-beam at 60 deg incidence; the stride-5
    # snap leaves 7 active columns
    design = design_period(
        60.0, -30.0, WAVELENGTH, n=1, d0=PITCH, wells_per_row=SCAFFOLD_M
    )
    snapped = period_design_to_mask(design, PITCH, SCAFFOLD_M)
    task = SteeringTask(60.0, ((-30.0, 1.0 + 0j), (-7.8, 1.0 + 0j)))
    return {
        "diffraction_snapped": pattern_sweep(aperture, snapped.coefficients, 60.0, grid),
        "onoff": pattern_sweep(aperture, synthesize_mask(aperture, task), 60.0, grid),
        "ideal": pattern_sweep(
            aperture, ideal_continuous_weights(aperture, task), 60.0, grid
        ),
    }
