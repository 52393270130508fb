import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from threewave import KahlerStructure
from threewave.phases import compute_phases

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

DEFAULT_Q0 = np.array([1.0, 0.5, 0.6 + 0.2j])

coord = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)
complex_numbers = st.builds(complex, coord, coord)
vectors = st.lists(complex_numbers, min_size=3, max_size=3).map(np.array)
angles = st.tuples(st.floats(-10, 10), st.floats(-10, 10)).map(np.array)
algebra = st.tuples(coord, coord).map(np.array)


@st.composite
def regular_points(draw, floor=0.2):
    """Points whose three amplitudes stay away from zero."""
    mags = draw(st.lists(st.floats(floor, 2.0), min_size=3, max_size=3))
    args = draw(st.lists(st.floats(-np.pi, np.pi), min_size=3, max_size=3))
    return np.array(mags) * np.exp(1j * np.array(args))


weights = st.sampled_from([(1.0, 1.0, 1.0), (1.3, 0.7, 2.1), (0.5, 2.0, 1.5), (1.3, -0.7, 2.1)])


@pytest.fixture
def unit():
    return KahlerStructure.unit()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def default_phases():
    return compute_phases(KahlerStructure.unit(), DEFAULT_Q0)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    if mod is not None and mod.LEDGER:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(mod.LEDGER.items()):
            terminalreporter.write_line(line)
