import math

import numpy as np
import pytest
from hypothesis import strategies as st

from polarpoly.geometry import TWO_PI, CartesianPolygon, PolarPolygon, Point

UNIT_SQUARE = CartesianPolygon(np.array([(0, 0), (1, 0), (1, 1), (0, 1)], float))
L_HEXAGON = CartesianPolygon(np.array([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)], float))


def random_star(rng, k, convex=False, origin=None, max_gap=0.9 * math.pi):
    """Polar polygon star-shaped about its origin; convex ones lie on an ellipse."""
    while True:
        a = np.sort(rng.uniform(0, TWO_PI, k))
        gaps = np.diff(np.append(a, a[0] + TWO_PI))
        if gaps.max() < max_gap and gaps.min() > 1e-3:
            break
    o = rng.uniform(-3, 3, 2) if origin is None else np.asarray(origin, float)
    if convex:
        # points on an axis-aligned ellipse centred at the origin
        ax, by = rng.uniform(0.5, 3.0, 2)
        t = a
        x, y = ax * np.cos(t), by * np.sin(t)
        ang = np.mod(np.arctan2(y, x), TWO_PI)
        order = np.argsort(ang)
        return PolarPolygon(Point(*o), ang[order], np.hypot(x, y)[order])
    return PolarPolygon(Point(*o), a, rng.uniform(0.3, 2.0, k))


@st.composite
def star_polygons(draw, k_min=3, k_max=40, convex=False):
    seed = draw(st.integers(0, 2**32 - 1))
    k = draw(st.integers(k_min, k_max))
    return random_star(np.random.default_rng(seed), k, convex=convex)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict[int, str] = {}


def record_acceptance(n: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
