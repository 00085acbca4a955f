# tests/conftest.py
import pytest

from core.funcspec import CantorStaircase
from core.interval import Interval
from core.witness import build_tree

from corpus import make_pl_corpus


@pytest.fixture(scope="session")
def pl_corpus():
    return make_pl_corpus()


@pytest.fixture(scope="session")
def staircase() -> CantorStaircase:
    return CantorStaircase(ratio=1.0 / 3.0, digit_depth=40)


@pytest.fixture(scope="session")
def cantor_tree(staircase):
    return build_tree(staircase, Interval(0.0, 1.0), 10.0, depth=8, search_depth=6, resolution_depth=12)
