"""Samplers: determinism, uniformity, model-specific contracts."""

import math
from collections import Counter

import numpy as np
import pytest

import knotlab as kl
from knotlab.samplers import (
    ModelSpec,
    crisscross_word,
    fourier_cutoff,
    make_rng,
    petal_link_diagram,
    sample_object,
    substream,
)

# chi-square critical values (0.001 upper tail), from standard tables
CHI2_999 = {5: 20.52, 9: 27.88, 119: 173.62}


def test_substreams_deterministic_and_distinct():
    a = substream(7, 3).integers(0, 2 ** 63, 8)
    b = substream(7, 3).integers(0, 2 ** 63, 8)
    assert np.array_equal(a, b)
    draws = {int(substream(42, i).integers(0, 2 ** 63)) for i in range(10_000)}
    assert len(draws) == 10_000  # no collisions across shard indices


def test_petaluma_determinism_and_errors():
    p1 = kl.sample_petaluma(9, 5)
    p2 = kl.sample_petaluma(9, 5)
    assert p1 == p2
    with pytest.raises(ValueError):
        kl.sample_petaluma(4, 0)


def test_petaluma_uniformity_3_petals():
    n = 60_000
    rng = make_rng(1)
    counts = Counter(kl.sample_petaluma(3, rng).heights for _ in range(n))
    p = 1 / 6
    sigma = math.sqrt(p * (1 - p) / n)
    for perm, cnt in counts.items():
        assert abs(cnt / n - p) < 4 * sigma, perm


def test_petaluma_uniformity_5_petals_chi_square():
    n = 120_000
    rng = make_rng(2)
    counts = Counter(kl.sample_petaluma(5, rng).heights for _ in range(n))
    assert len(counts) == 120
    expected = n / 120
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < CHI2_999[119]


def test_grid_sampler():
    g1 = kl.sample_grid(10, 3)
    assert g1 == kl.sample_grid(10, 3)
    with pytest.raises(ValueError):
        kl.sample_grid(1, 0)
    n = 40_000
    rng = make_rng(3)
    counts = Counter(kl.sample_grid(2, rng) for _ in range(n))
    assert len(counts) == 4
    p = 1 / 4
    sigma = math.sqrt(p * (1 - p) / n)
    for cnt in counts.values():
        assert abs(cnt / n - p) < 4 * sigma


def test_grid_rho_marginal_chi_square():
    n = 30_000
    rng = make_rng(4)
    counts = Counter(kl.sample_grid(10, rng).rho[0] for _ in range(n))
    expected = n / 10
    chi2 = sum((counts.get(k, 0) - expected) ** 2 / expected for k in range(10))
    assert chi2 < CHI2_999[9]


def test_griddle_degenerate_coin_is_grid():
    from knotlab.samplers import _rerandomize_crossings
    rng = make_rng(5)
    for _ in range(20):
        g = kl.sample_grid(8, rng)
        d = kl.grid_to_diagram(g)
        assert _rerandomize_crossings(d, np.zeros(d.crossing_count, dtype=np.int64)) == d


def test_griddle_preserves_curve():
    rng = make_rng(6)
    for seed in range(10):
        d = kl.sample_griddle(8, seed)
        g = kl.grid_to_diagram(kl.sample_grid(8, seed))
        assert d.crossing_count == g.crossing_count
        assert kl.defect(d) == kl.defect(g)


def test_jump_domains():
    rng = make_rng(7)
    cube = kl.sample_jump(50, "cube", rng)
    assert np.all((cube.components[0] >= 0) & (cube.components[0] <= 1))
    sph = kl.sample_jump(50, "sphere", rng)
    assert np.allclose(np.linalg.norm(sph.components[0], axis=1), 1.0, atol=1e-12)
    ball = kl.sample_jump(50, "ball", rng)
    assert np.all(np.linalg.norm(ball.components[0], axis=1) <= 1.0 + 1e-12)
    two = kl.sample_jump(None, "cube", rng, counts=[10, 20])
    assert len(two.components) == 2
    with pytest.raises(ValueError):
        kl.sample_jump(50, "torus", rng)


def test_gaussian_polygon_closure():
    poly = kl.sample_gaussian_polygon(64, 8)
    verts = poly.components[0]
    steps = np.diff(np.vstack([verts, verts[:1]]), axis=0)
    assert np.linalg.norm(steps.sum(axis=0)) < 1e-9
    tri = kl.sample_gaussian_polygon(3, 9)
    d = kl.project_generic(tri, make_rng(1))
    assert kl.determinant(d) == 1 and kl.casson_c2(d) == 0


def test_fourier_loop():
    poly = kl.sample_fourier_loop(1, "sharp-cutoff", 16, 10)
    d = kl.project_generic(poly, make_rng(2))
    assert kl.determinant(d) == 1 and kl.casson_c2(d) == 0
    with pytest.raises(ValueError):
        kl.sample_fourier_loop(4, "sharp-cutoff", 40, 0)  # undersampled
    assert fourier_cutoff(8, "sharp-cutoff") == 8
    assert fourier_cutoff(8, "exp") > 8
    assert fourier_cutoff(8, "gauss") > 8
    assert fourier_cutoff(8, "power", alpha=2.0) >= 1
    # decaying schemes keep >= (1 - 1e-6) of the total mode variance
    for scheme, alpha in (("exp", 2.0), ("gauss", 2.0), ("power", 1.5)):
        K = fourier_cutoff(8, scheme, alpha)
        w = {"exp": lambda k: math.exp(-k / 8),
             "gauss": lambda k: math.exp(-((k / 8) ** 2)),
             "power": lambda k: k ** -alpha}[scheme]
        total = sum((w(k) / k) ** 2 for k in range(1, 20 * K))
        tail = sum((w(k) / k) ** 2 for k in range(K + 1, 20 * K))
        assert tail < 1e-6 * total


def test_braid_walk():
    b = kl.sample_braid_walk(2, 30, "trace", 11)
    assert all(l in (-1, 1) for l in b.letters)
    d = kl.braid_closure_to_diagram(b)
    assert kl.writhe(d) == sum(b.letters)
    assert b == kl.sample_braid_walk(2, 30, "trace", 11)
    b4 = kl.sample_braid_walk(4, 50, "plat", 12)
    assert all(1 <= abs(l) <= 3 for l in b4.letters)


def test_braid_walk_knot_fraction():
    # "knots with probability about 1/m" holds in the parity-averaged sense:
    # a length-L word is a product of L transpositions, so at even L the
    # closure of a 3-braid is a knot iff the (near-uniform A_3) permutation
    # is a 3-cycle (probability 2/3) and at odd L it never is; averaging the
    # two parities gives 1/3
    rng = make_rng(13)
    n = 5_000
    knots_even = sum(
        kl.braid_closure_to_diagram(kl.sample_braid_walk(3, 60, "trace", rng))
        .component_count == 1 for _ in range(n))
    knots_odd = sum(
        kl.braid_closure_to_diagram(kl.sample_braid_walk(3, 61, "trace", rng))
        .component_count == 1 for _ in range(n))
    assert abs(knots_even / n - 2 / 3) < 0.05
    assert knots_odd == 0
    assert abs((knots_even + knots_odd) / (2 * n) - 1 / 3) < 0.05


def test_crisscross_words():
    assert crisscross_word("flat-torus", p=2, q=3) == [1, 1, 1]
    assert crisscross_word("star", n=2) == [1] * 5
    assert crisscross_word("billiard", a=5, b=9) == [1, 3, 2, 4] * 4
    assert crisscross_word("billiard", a=3, b=4) == [1, 2, 1]
    with pytest.raises(ValueError):
        crisscross_word("billiard", a=3, b=9)  # not coprime


def test_star_positive_is_torus_knot():
    d = kl.flat_torus_diagram(2, 5, [1] * 5)
    assert kl.determinant(d) == 5  # (2,5) torus knot
    assert kl.casson_c2(d) == 3


def test_billiard_component_count():
    rng = make_rng(14)
    for b in (4, 5, 8, 11):
        word = crisscross_word("billiard", a=3, b=b)
        # cycle-count oracle on the strand permutation
        perm = list(range(3))
        for g in word:
            perm[g - 1], perm[g] = perm[g], perm[g - 1]
        seen, cycles = set(), 0
        for s in range(3):
            if s not in seen:
                cycles += 1
                while s not in seen:
                    seen.add(s)
                    s = perm.index(s)
        for _ in range(5):
            d = kl.sample_crisscross("billiard", rng, a=3, b=b)
            assert d.component_count == cycles
            assert cycles in (1, 2)


def test_petal_link_two_two_exhaustive():
    import itertools
    values = Counter()
    for heights in itertools.permutations(range(4)):
        d = petal_link_diagram([2, 2], heights)
        assert d.component_count == 2
        assert kl.validate_diagram(d).ok
        values[kl.linking_number(d, 0, 1)] += 1
    assert set(values) == {-1, 0, 1}
    assert values[1] == values[-1]


def test_petal_link_bound_and_symmetry():
    rng = make_rng(15)
    n = 10
    vals = []
    for _ in range(300):
        d = kl.sample_petaluma_link([2 * n, 2 * n], rng)
        lk = kl.linking_number(d, 0, 1)
        vals.append(lk)
        assert abs(lk) < n * n
    assert d.component_count == 2
    mean = np.mean(vals)
    sem = np.std(vals) / math.sqrt(len(vals))
    assert abs(mean) < 4 * max(sem, 1e-9)


def test_petal_link_validation():
    with pytest.raises(ValueError):
        kl.sample_petaluma_link([2], 0)
    with pytest.raises(ValueError):
        kl.sample_petaluma_link([3, 3], 0)
    with pytest.raises(ValueError):
        petal_link_diagram([2, 2], [0, 1, 2, 2])


def test_model_spec_json_and_validation():
    spec = ModelSpec("PetalumaKnot", {"petals": 7})
    assert ModelSpec.from_json(spec.to_json()) == spec
    with pytest.raises(ValueError):
        ModelSpec("Nonsense", {})
    with pytest.raises(ValueError):
        ModelSpec("PetalumaKnot", {"petals": 8})
    with pytest.raises(ValueError):
        ModelSpec("Billiard", {"a": 3, "b": 9})
    with pytest.raises(ValueError):
        ModelSpec("FourierLoop", {"n": 4, "points": 10})
    with pytest.raises(ValueError):
        ModelSpec("BraidWalk", {"strands": 3, "length": 5}, {"closure": "plat"})


def test_sample_object_determinism_across_families():
    specs = [
        ModelSpec("PetalumaKnot", {"petals": 9}),
        ModelSpec("PetalumaLink", {"petals": [4, 4]}),
        ModelSpec("GridKnot", {"n": 8}),
        ModelSpec("Griddle", {"n": 8}),
        ModelSpec("JumpPolygon", {"n": 12}, {"domain": "ball"}),
        ModelSpec("GaussianPolygon", {"n": 12}),
        ModelSpec("FourierLoop", {"n": 2}, {"scheme": "exp"}),
        ModelSpec("BraidWalk", {"strands": 3, "length": 9}),
        ModelSpec("FlatTorus", {"p": 3, "q": 4}),
        ModelSpec("Star", {"n": 3}),
        ModelSpec("Billiard", {"a": 3, "b": 5}),
    ]
    for spec in specs:
        o1 = sample_object(spec, substream(3, 5))
        o2 = sample_object(spec, substream(3, 5))
        if isinstance(o1, kl.Polygon3D):
            assert all(np.array_equal(a, b) for a, b in
                       zip(o1.components, o2.components))
        else:
            assert o1 == o2
