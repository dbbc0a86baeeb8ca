import pytest

from resolab import SpeedClassParams
from resolab.activator import SmoothBaseSpeed

# Reference admissibility class used throughout: bounds [1, 4], exponent 1/2,
# Hölder budget 8, no damping unless a test overrides it.


@pytest.fixture(scope="session")
def ref_class():
    return SpeedClassParams(speed_min=1.0, speed_max=4.0, alpha=0.5, holder_bound=8.0)


@pytest.fixture(scope="session")
def midpoint_base():
    return SmoothBaseSpeed.constant(2.5)
