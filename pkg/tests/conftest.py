import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from linfjunta.inequalities import RandomPolySpec, random_trigpoly

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def trig_polys(draw, max_dim=3, max_degree=2, normalize=False):
    dim = draw(st.integers(1, max_dim))
    degree = draw(st.integers(1, max_degree))
    scale = draw(st.sampled_from([0.1, 1.0, 5.0]))
    seed = draw(st.integers(0, 2**32))
    return random_trigpoly(RandomPolySpec(dim, degree, scale, seed, normalize))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
