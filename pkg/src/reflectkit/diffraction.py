"""Uniform-period (diffraction-order) steering design.

A uniform aperture of period delta reradiates into a discrete set of orders;
order n leaves at theta_n = asin(n*lambda/delta - sin theta_i).  Choosing
delta places a chosen order at the target departure angle.  On the fixed
fabrication scaffold the period snaps to an integer well stride.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError
from .masks import MaskDesign, SteeringTask
from .core import Aperture

_SPECULAR_EPS = 1e-12


@dataclass(frozen=True)
class SnappedPeriod:
    """Period realized on the well scaffold: every p-th well of a row."""

    stride: int
    delta_actual: float
    m_active: int


@dataclass(frozen=True)
class PeriodDesign:
    period: float
    order: int
    theta_i: float
    theta_t: float
    wavelength: float
    snapped: SnappedPeriod | None = None


@dataclass(frozen=True)
class OrderSet:
    n_min: int
    n_max: int
    directions: tuple[tuple[int, float], ...]

    @property
    def count(self) -> int:
        return self.n_max - self.n_min + 1

    def direction_of(self, n: int) -> float | None:
        for order, theta in self.directions:
            if order == n:
                return theta
        return None


def period_for_target(
    theta_i: float, theta_t: float, wavelength: float, n: int
) -> float:
    """Closed-form period delta = n*lambda / (sin theta_t + sin theta_i)."""
    if wavelength <= 0:
        raise ValidationError("wavelength must be positive")
    if n == 0:
        raise ValidationError(
            "order n=0 is period-independent (specular); choose a nonzero order"
        )
    sine_sum = math.sin(math.radians(theta_t)) + math.sin(math.radians(theta_i))
    if abs(sine_sum) < _SPECULAR_EPS:
        raise ValidationError(
            "specular geometry: order n=0 is period-independent, no finite period "
            "aligns a nonzero order"
        )
    delta = n * wavelength / sine_sum
    if delta <= 0:
        raise ValidationError(
            f"order n={n} has the wrong sign for this geometry "
            f"(sin theta_t + sin theta_i = {sine_sum:.6f})"
        )
    return delta


def order_direction(
    delta: float, wavelength: float, theta_i: float, n: int
) -> float | None:
    """Departure angle of order n in degrees, or None if the order is invisible."""
    if delta <= 0:
        raise ValidationError("period delta must be positive")
    if wavelength <= 0:
        raise ValidationError("wavelength must be positive")
    arg = n * wavelength / delta - math.sin(math.radians(theta_i))
    if abs(arg) > 1.0:
        return None
    return math.degrees(math.asin(arg))


def visible_orders(delta: float, wavelength: float, theta_i: float) -> OrderSet:
    """All visible diffraction orders and their departure angles."""
    if delta <= 0:
        raise ValidationError("period delta must be positive")
    ratio = delta / wavelength
    sin_i = math.sin(math.radians(theta_i))
    n_min = math.ceil(ratio * (sin_i - 1.0))
    n_max = math.floor(ratio * (sin_i + 1.0))
    directions = []
    for n in range(n_min, n_max + 1):
        theta = order_direction(delta, wavelength, theta_i, n)
        if theta is None:
            # n_min/n_max bracket exactly the visible range; a miss here is
            # a float rounding artifact at |arg| = 1.
            arg = max(-1.0, min(1.0, n * wavelength / delta - sin_i))
            theta = math.degrees(math.asin(arg))
        directions.append((n, theta))
    return OrderSet(n_min, n_max, tuple(directions))


def snap_to_grid(delta: float, d0: float, wells_per_row: int) -> SnappedPeriod:
    """Round the period to an integer well stride on the fixed scaffold.

    stride = round(delta/d0) half-up; active wells sit at indices 0, p, 2p, ...
    """
    if d0 <= 0:
        raise ValidationError("scaffold pitch d0 must be positive")
    if wells_per_row < 1:
        raise ValidationError("wells_per_row must be >= 1")
    if delta < d0:
        raise ValidationError(
            f"period {delta} is finer than the scaffold pitch {d0}; cannot snap"
        )
    stride = max(1, math.floor(delta / d0 + 0.5))
    m_active = (wells_per_row - 1) // stride + 1
    return SnappedPeriod(stride, stride * d0, m_active)


def design_period(
    theta_i: float,
    theta_t: float,
    wavelength: float,
    n: int = 1,
    d0: float | None = None,
    wells_per_row: int | None = None,
) -> PeriodDesign:
    """Full single-beam period design, optionally snapped to the scaffold."""
    delta = period_for_target(theta_i, theta_t, wavelength, n)
    snapped = None
    if d0 is not None:
        if wells_per_row is None:
            raise ValidationError("wells_per_row is required when snapping to a grid")
        snapped = snap_to_grid(delta, d0, wells_per_row)
    return PeriodDesign(delta, n, theta_i, theta_t, wavelength, snapped)


def multibeam_period_check(
    design: PeriodDesign,
    extra_targets: list[float],
    tol: float = 0.5,
) -> list[dict]:
    """For each extra target, report whether some visible order covers it.

    Each entry: {'target': angle, 'covered': bool, 'order': n or None,
    'order_theta': angle of the covering (or nearest) order}.
    """
    orders = visible_orders(design.period, design.wavelength, design.theta_i)
    report = []
    for target in extra_targets:
        best = min(orders.directions, key=lambda d: abs(d[1] - target))
        covered = abs(best[1] - target) <= tol
        report.append(
            {
                "target": target,
                "covered": covered,
                "order": best[0] if covered else None,
                "order_theta": best[1],
            }
        )
    return report


def period_design_to_mask(design: PeriodDesign, d0: float, wells_per_row: int) -> MaskDesign:
    """Expand a (snapped) period design into the shared mask-file format.

    ON wells at indices 0, p, 2p, ... of a row, so simulation and fabrication
    consume the same JSON contract as synthesized masks.
    """
    snapped = design.snapped or snap_to_grid(design.period, d0, wells_per_row)
    bits = "".join(
        "1" if (m % snapped.stride == 0) else "0" for m in range(wells_per_row)
    )
    aperture = Aperture(wells_per_row, d0, design.wavelength)
    task = SteeringTask.single(design.theta_i, design.theta_t)
    return MaskDesign(aperture, task, bits)
