import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from spindiode import ChainSpec

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_spec(rng, n, nearest_only=False, scale=1.0):
    field = rng.uniform(-scale, scale, n)
    coupling = {}
    for i in range(1, n + 1):
        for k in range(i + 1, n + 1):
            if nearest_only and k != i + 1:
                continue
            coupling[(i, k)] = rng.uniform(-scale, scale)
    return ChainSpec(n, field, coupling)


@st.composite
def chain_specs(draw, min_sites=2, max_sites=5, nearest_only=False):
    n = draw(st.integers(min_sites, max_sites))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_spec(np.random.default_rng(seed), n, nearest_only)


temperatures = st.floats(0.2, 3.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[key])
