"""Shared fixtures: canonical bodies and seeded random families."""

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from bodygraphs.bodies import (SymmetricBody, apply_linear, disk_body,
                               regular_polygon, square_body)


def random_symmetric_polygon(rng: np.random.Generator) -> SymmetricBody:
    """Hull of +-p_i for a handful of random points; centrally symmetric
    by construction, built without the package's own symmetrizer."""
    m = int(rng.integers(4, 9))
    pts = rng.normal(size=(m, 2)) * rng.uniform(0.5, 2.0)
    pts = np.vstack([pts, -pts])
    hull = ConvexHull(pts)
    return SymmetricBody(pts[hull.vertices])


def random_nonsingular(rng: np.random.Generator, spread: float = 1.0) -> np.ndarray:
    while True:
        m = rng.normal(size=(2, 2)) * spread + np.eye(2)
        if abs(np.linalg.det(m)) > 0.2:
            return m


@pytest.fixture(scope="session")
def disk256():
    return disk_body(256)


@pytest.fixture(scope="session")
def hexagon():
    return regular_polygon(6)


@pytest.fixture(scope="session")
def square():
    return square_body()


@pytest.fixture(scope="session")
def pentagon_sym():
    return regular_polygon(5, symmetrized=True)


@pytest.fixture(scope="session")
def heptagon_sym():
    return regular_polygon(7, symmetrized=True)


@pytest.fixture(scope="session")
def octagon():
    return regular_polygon(8)


@pytest.fixture(scope="session")
def named_fixtures(disk256, hexagon, square, pentagon_sym, heptagon_sym,
                   octagon):
    return {
        "disk256": disk256,
        "square": square,
        "hexagon": hexagon,
        "pentagon_sym": pentagon_sym,
        "heptagon_sym": heptagon_sym,
        "octagon": octagon,
    }


@pytest.fixture(scope="session")
def random_polygons():
    rng = np.random.default_rng(20260814)
    return [random_symmetric_polygon(rng) for _ in range(20)]


@pytest.fixture(scope="session")
def random_parallelograms():
    rng = np.random.default_rng(711)
    base = square_body()
    return [apply_linear(base, random_nonsingular(rng)) for _ in range(10)]


@pytest.fixture(scope="session")
def cert_disk_hex(disk256, hexagon):
    from bodygraphs.separation import find_separation
    return find_separation(disk256, hexagon, max_level=5)
