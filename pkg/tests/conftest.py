import pathlib
import sys

SRC = pathlib.Path(__file__).resolve().parent.parent / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

import pytest

from trielect.generators import hexagon, line, parallelogram, triangle3
from trielect.oracle import find_unfair_cycle


@pytest.fixture
def tri():
    return triangle3()


@pytest.fixture
def hex1():
    return hexagon(1)


@pytest.fixture(scope="session")
def hexagon_cycle():
    cycle = find_unfair_cycle(hexagon(1))
    assert cycle is not None
    return cycle


@pytest.fixture
def line3():
    return line(3)


@pytest.fixture
def para23():
    return parallelogram(2, 3)
