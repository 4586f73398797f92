import os
import sys
from fractions import Fraction

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from kstab.geometry import PLConvexFunction, RationalPolytope
from kstab.toric import PolarizedToric, hirzebruch_fan


@pytest.fixture
def p1():
    return PolarizedToric.from_polytope(RationalPolytope.from_vertices([(0,), (1,)]), "P1")


@pytest.fixture
def p2():
    return PolarizedToric.from_polytope(
        RationalPolytope.from_vertices([(0, 0), (1, 0), (0, 1)]), "P2")


@pytest.fixture
def p1xp1():
    return PolarizedToric.from_polytope(RationalPolytope.box((0, 0), (1, 1)), "P1xP1")


@pytest.fixture
def f1():
    return PolarizedToric(hirzebruch_fan(1), [0, 0, 1, 1], "F1")


def pl(X, *pieces):
    return PLConvexFunction([(g, Fraction(c)) for g, c in pieces], X.moment_polytope)
