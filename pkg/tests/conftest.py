"""Shared lattice and model fixtures."""

from pathlib import Path

import numpy as np
import pytest

from colorz.colex import Colex, generate_hexagonal, generate_square_octagon, validate

DATA_DIR = Path(__file__).parent / "data"


def make_prism(k: int) -> Colex:
    """Genus-0 colex: prism over a k-cycle (two k-gon caps plus k squares).

    Valid for even k >= 4: caps need even size and the square band needs an
    even cycle for its 2-coloring.  V = 2k, F = k + 2; k = 4 is the cube.
    """
    top = list(range(k))
    bot = list(range(k, 2 * k))
    faces = [tuple(top), tuple(reversed(bot))]
    colors = [0, 0]
    for i in range(k):
        j = (i + 1) % k
        faces.append((top[i], top[j], bot[j], bot[i]))
        colors.append(1 + i % 2)
    colex = Colex(2 * k, tuple(faces), tuple(colors))
    report = validate(colex)
    assert report.ok, f"prism k={k} invalid:\n{report}"
    return colex


def random_model_params(colex: Colex, seed: int):
    """One random (beta, couplings) draw: beta in [0, 2], J_a in [-2, 2]."""
    rng = np.random.default_rng(seed)
    beta = float(rng.uniform(0.0, 2.0))
    couplings = tuple(float(j) for j in rng.uniform(-2.0, 2.0, colex.vertex_count))
    return beta, couplings


@pytest.fixture(scope="session")
def hex33() -> Colex:
    return generate_hexagonal(3, 3)


@pytest.fixture(scope="session")
def hex36() -> Colex:
    return generate_hexagonal(3, 6)


@pytest.fixture(scope="session")
def sqoct44() -> Colex:
    return generate_square_octagon(4, 4)


@pytest.fixture(scope="session")
def cube() -> Colex:
    from colorz.colex import load_colex

    return load_colex(DATA_DIR / "cube.json")


@pytest.fixture(scope="session")
def prism8() -> Colex:
    return make_prism(8)


@pytest.fixture
def cube_path() -> Path:
    return DATA_DIR / "cube.json"
