import pathlib

import numpy as np
import pytest

import knotlab as kl

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def dt_fixtures():
    return kl.load_dt_fixtures(FIXTURES / "knots.dt")


@pytest.fixture(scope="session")
def hex_trefoil():
    return kl.Polygon3D.from_json((FIXTURES / "trefoil_hex.json").read_text())


def random_knot_diagram(rng, kind=None):
    """A random single-component diagram from a random in-scope model."""
    kind = kind or rng.choice(["grid", "petal", "braid", "griddle", "star"])
    if kind == "grid":
        n = int(rng.integers(4, 9))
        g = kl.GridDiagram(tuple(int(x) for x in rng.permutation(n)),
                           tuple(int(x) for x in rng.permutation(n)))
        return kl.grid_to_diagram(g)
    if kind == "petal":
        petals = int(rng.choice([5, 7, 9]))
        p = kl.PetalPermutation(tuple(int(x) for x in rng.permutation(petals)))
        return kl.grid_to_diagram(kl.petal_to_grid(p))
    if kind == "braid":
        while True:
            m = int(rng.integers(2, 5))
            L = int(rng.integers(3, 10))
            letters = tuple(int(g) * int(s) for g, s in
                            zip(rng.integers(1, m, L), 1 - 2 * rng.integers(0, 2, L)))
            d = kl.braid_closure_to_diagram(kl.BraidWord(strands=m, letters=letters))
            if d.component_count == 1:
                return d
    if kind == "griddle":
        return kl.sample_griddle(int(rng.integers(4, 9)), rng)
    if kind == "star":
        return kl.sample_crisscross("star", rng, n=int(rng.integers(2, 5)))
    raise ValueError(kind)
