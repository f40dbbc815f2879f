"""Design and verification toolkit for fully passive binary-coded reflectors."""

from .core import (
    AngularPattern,
    Aperture,
    ReflectionCoefficients,
    angle_grid,
    array_factor,
    element_positions,
    pattern_sweep,
    peak_to_sidelobe,
    uniform_closed_form,
)
from .errors import ParseError, ValidationError
from .masks import (
    MaskDesign,
    PhaseProfile,
    SteeringTask,
    design_mask,
    ideal_continuous_weights,
    ideal_phase_profile,
    multibeam_mask,
    multibeam_profile,
    quantize_bipolar,
    select_psi,
    single_beam_mask,
    synthesize_mask,
    thinning_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "AngularPattern",
    "Aperture",
    "MaskDesign",
    "ParseError",
    "PhaseProfile",
    "ReflectionCoefficients",
    "SteeringTask",
    "ValidationError",
    "angle_grid",
    "array_factor",
    "design_mask",
    "element_positions",
    "ideal_continuous_weights",
    "ideal_phase_profile",
    "multibeam_mask",
    "multibeam_profile",
    "pattern_sweep",
    "peak_to_sidelobe",
    "quantize_bipolar",
    "select_psi",
    "single_beam_mask",
    "synthesize_mask",
    "thinning_ratio",
    "uniform_closed_form",
]
