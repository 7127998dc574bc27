import math

import hypothesis.strategies as st
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def prob_lists(draw, min_dim=1, max_dim=6, allow_zero=True):
    """Raw probability vectors, normalized with fsum."""
    dim = draw(st.integers(min_dim, max_dim))
    lo = 0.0 if allow_zero else 1e-3
    raw = draw(st.lists(st.floats(lo, 1.0), min_size=dim, max_size=dim))
    if math.fsum(raw) <= 0.0:
        raw = [1.0] + raw[1:]
    total = math.fsum(raw)
    return [x / total for x in raw]


@pytest.fixture
def rng():
    import random
    return random.Random(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
