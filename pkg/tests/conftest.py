import json
import pathlib
import sys

import pytest

_SRC = pathlib.Path(__file__).parent.parent / "src"
if str(_SRC) not in sys.path:
    sys.path.insert(0, str(_SRC))

from curvlab.potential import solve
from curvlab.profile import (
    euclidean,
    mollified_schwarzschild,
    perturbed_schwarzschild,
    schwarzschild,
    to_warped,
)


@pytest.fixture(scope="session")
def golden() -> dict[str, float]:
    path = pathlib.Path(__file__).parent / "golden.json"
    return json.loads(path.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def euclid_sol():
    return solve(euclidean())


@pytest.fixture(scope="session")
def schw1_sol():
    return solve(schwarzschild(1.0))


@pytest.fixture(scope="session")
def schw2_sol():
    return solve(schwarzschild(2.0))


@pytest.fixture(scope="session")
def moll11_sol():
    return solve(to_warped(mollified_schwarzschild(1.0, 1.0)))


@pytest.fixture(scope="session")
def perturbed_sol():
    return solve(perturbed_schwarzschild())
