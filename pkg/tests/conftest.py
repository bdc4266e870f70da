import numpy as np
import pytest

from fracberno import geometry


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def random_convex_polygon(rng, n_points=12, scale=1.0, center=(0.0, 0.0)):
    pts = rng.normal(size=(n_points, 2)) * scale + np.asarray(center)
    return geometry.convex_hull(pts)


@pytest.fixture
def unit_disk():
    return geometry.Ball((0.0, 0.0), 1.0)
