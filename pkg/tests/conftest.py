import logging
import os
import sys
from fractions import Fraction

import pytest

# ensure package path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import get_settings
from geometry_core import ConvexPolygon, pt
from instances import BaseShape, CoverInstance, DominationInstance, Homothet, make_base


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings are cached per process; tests that patch the environment need a clean read."""
    get_settings.cache_clear()
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    get_settings.cache_clear()
    root.handlers[:] = handlers
    root.setLevel(level)


def square(x0, y0, x1, y1) -> ConvexPolygon:
    return ConvexPolygon.rectangle(x0, y0, x1, y1)


def unit_homothets(*centers) -> DominationInstance:
    """Unit squares of the [0,1]^2 base centered at the given points."""
    base = make_base("square")
    return DominationInstance(base, tuple(Homothet(pt(*c), Fraction(1)) for c in centers))


@pytest.fixture
def unit_square():
    return square(0, 0, 1, 1)


@pytest.fixture
def two_squares():
    return [square(0, 0, 2, 2), square(1, 1, 3, 3)]


@pytest.fixture
def chain_instance():
    # A = [0,1]^2, B = [3/4,7/4]x[0,1], C = [3/2,5/2]x[0,1]: A-B and B-C overlap, A and C are apart
    return unit_homothets(("1/2", "1/2"), ("5/4", "1/2"), ("2", "1/2"))


@pytest.fixture
def disjoint_instance():
    return unit_homothets(("1/2", "1/2"), ("5/2", "1/2"), ("9/2", "1/2"))


@pytest.fixture
def three_chain_family():
    return [
        square(0, 0, 2, 2),
        ConvexPolygon.rectangle(1, Fraction(1, 2), 3, Fraction(5, 2)),
        ConvexPolygon.rectangle(Fraction(5, 2), 1, Fraction(9, 2), 3),
    ]


@pytest.fixture
def two_petal_pair():
    """U crosses V0 four times; U sticks out of V on the left only."""
    U0 = ConvexPolygon.rectangle(-1, 1, 5, 3)
    V0 = square(0, 0, 4, 4)
    V = ConvexPolygon.rectangle(0, 0, 10, 4)
    return U0, V0, U0, V


@pytest.fixture
def nested_cover():
    # object 0 sits inside object 1; object 2 is far away
    return CoverInstance(
        (square(1, 1, 2, 2), square(0, 0, 3, 3), square(5, 5, 6, 6)),
        (pt("1/2", "1/2"),),
    )


@pytest.fixture
def triangle_base():
    return BaseShape(ConvexPolygon([(-1, -1), (3, -1), (-1, 3)]), pt(0, 0))
