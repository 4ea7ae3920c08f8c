import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def ball_points(draw, n=1, max_radius=0.95):
    """Interior points of B_n drawn as direction times radius."""
    re = draw(st.lists(st.floats(-1, 1), min_size=n, max_size=n))
    im = draw(st.lists(st.floats(-1, 1), min_size=n, max_size=n))
    v = np.array(re) + 1j * np.array(im)
    nv = np.linalg.norm(v)
    if nv < 1e-6:
        v = np.zeros(n, dtype=complex)
        v[0] = 1.0
        nv = 1.0
    rad = draw(st.floats(0, max_radius))
    return rad * v / nv


def random_ball(rng, count, n=1, max_radius=0.95):
    v = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * (max_radius * rng.uniform(size=(count, 1)) ** (1 / (2 * n)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# (criterion, title, passed, detail) rows filled in by test_acceptance.py
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key, title, ok, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key:<14} {title}: {detail}")
