import hypothesis
import numpy as np
import pytest

hypothesis.settings.register_profile(
    "default", max_examples=40, deadline=None, derandomize=True,
    suppress_health_check=[hypothesis.HealthCheck.too_slow])
hypothesis.settings.load_profile("default")


def circle_dist(a, b) -> float:
    """Max per-coordinate distance on the torus."""
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    return float(np.max(np.minimum(d, 1.0 - d)))


@pytest.fixture
def assert_on_circle():
    def inner(a, b, tol):
        assert circle_dist(a, b) <= tol, (a, b, circle_dist(a, b))
    return inner
