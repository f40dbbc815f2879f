import numpy as np
import pytest

from reflectkit.core import Aperture
from reflectkit.masks import SteeringTask

# The fabricated prototype scaffold: 35 wells at 2.5 mm pitch, 60 GHz.
WAVELENGTH = 5e-3
PITCH = 2.5e-3
M = 35


@pytest.fixture
def aperture() -> Aperture:
    return Aperture(M, PITCH, WAVELENGTH)


@pytest.fixture
def single_task() -> SteeringTask:
    return SteeringTask.single(45.0, -10.0)


@pytest.fixture
def dual_task() -> SteeringTask:
    return SteeringTask(30.0, ((-7.8, 1.0 + 0j), (-60.0, 1.0 + 0j)))


def signed_volume_mm3(triangles: np.ndarray) -> float:
    """Divergence-theorem volume of a closed, outward-oriented triangle mesh."""
    t = np.asarray(triangles)
    return float(np.einsum("ij,ij->i", t[:, 0], np.cross(t[:, 1], t[:, 2])).sum() / 6.0)


def assert_watertight(triangles: np.ndarray) -> None:
    """Every directed edge occurs exactly once and its reverse exists."""
    from collections import Counter

    counts: Counter = Counter()
    for tri in np.round(np.asarray(triangles), 6):
        v = [tuple(p) for p in tri]
        for a, b in ((0, 1), (1, 2), (2, 0)):
            counts[(v[a], v[b])] += 1
    assert all(n == 1 for n in counts.values()), "duplicated directed edge"
    assert all((b, a) in counts for (a, b) in counts), "unmatched edge"
