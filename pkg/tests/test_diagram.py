"""Diagram representations, conversions, validation, DT codes."""

import itertools

import numpy as np
import pytest

import knotlab as kl
from knotlab.diagram import OVER, UNDER, DTParseError

from conftest import random_knot_diagram


def test_validate_empty_circle():
    d = kl.DiagramCode([[]])
    rep = kl.validate_diagram(d)
    assert rep.ok and d.crossing_count == 0


def test_validate_role_pair_broken():
    d = kl.DiagramCode([[(0, OVER, 1), (0, OVER, 1)]])
    rep = kl.validate_diagram(d)
    assert not rep.ok
    assert any("role pair broken" in v for v in rep.violations)


def test_validate_sign_mismatch():
    d = kl.DiagramCode([[(0, OVER, 1), (0, UNDER, -1)]])
    rep = kl.validate_diagram(d)
    assert not rep.ok
    assert any("sign mismatch" in v for v in rep.violations)


def test_validate_missing_visit():
    d = kl.DiagramCode([[(0, OVER, 1), (0, UNDER, 1), (1, OVER, 1)]])
    assert not kl.validate_diagram(d).ok


def test_grid_trivial_rectangle():
    d = kl.grid_to_diagram(kl.GridDiagram(rho=(0, 1), sigma=(0, 1)))
    assert d.crossing_count == 0
    assert d.component_count == 1
    assert kl.determinant(d) == 1


def brute_force_grid_crossings(rho, sigma):
    """Independent O(n^2) segment-pair intersection count on coordinates."""
    n = len(rho)
    count = 0
    for i in range(n):
        x = rho[i]
        y0, y1 = sigma[i], sigma[(i + 1) % n]
        for j in range(n):
            y = sigma[(j + 1) % n]
            x0, x1 = rho[j], rho[(j + 1) % n]
            if min(x0, x1) < x < max(x0, x1) and min(y0, y1) < y < max(y0, y1):
                count += 1
    return count


def test_grid_paper_example_figure7():
    rho = (4, 0, 6, 2, 9, 3, 8, 5, 1, 7)
    sigma = (9, 3, 6, 1, 5, 0, 8, 4, 7, 2)
    d = kl.grid_to_diagram(kl.GridDiagram(rho=rho, sigma=sigma))
    assert kl.validate_diagram(d).ok
    assert d.component_count == 1
    assert d.crossing_count == brute_force_grid_crossings(rho, sigma)


def test_grid_random_all_valid_single_component():
    rng = np.random.default_rng(12)
    for _ in range(1000):
        n = int(rng.integers(2, 10))
        g = kl.GridDiagram(tuple(int(x) for x in rng.permutation(n)),
                           tuple(int(x) for x in rng.permutation(n)))
        d = kl.grid_to_diagram(g)
        assert kl.validate_diagram(d).ok
        assert d.component_count == 1
        assert d.crossing_count == brute_force_grid_crossings(g.rho, g.sigma)


def geometric_grid_code(rho, sigma):
    """Independent re-derivation of the grid diagram from segment coordinates.

    Walks the explicit path corner by corner, intersecting coordinate
    segments pairwise (verticals over), with signs from the 2D cross product
    of (over direction, under direction).  Deliberately a separate, scalar
    implementation from knotlab.grid_to_diagram.
    """
    n = len(rho)
    segs = []  # (kind, fixed coord, lo, hi, direction, path slot)
    for i in range(n):
        segs.append(("v", rho[i], sigma[i], sigma[(i + 1) % n], 2 * i))
        segs.append(("h", sigma[(i + 1) % n], rho[i], rho[(i + 1) % n], 2 * i + 1))
    crossings = []
    for a, (ka, fa, a0, a1, _) in enumerate(segs):
        if ka != "v":
            continue
        for b, (kb, fb, b0, b1, _) in enumerate(segs):
            if kb != "h":
                continue
            if min(b0, b1) < fa < max(b0, b1) and min(a0, a1) < fb < max(a0, a1):
                over_dir = np.array([0.0, 1.0 if a1 > a0 else -1.0])
                under_dir = np.array([1.0 if b1 > b0 else -1.0, 0.0])
                sign = int(np.sign(over_dir[0] * under_dir[1] - over_dir[1] * under_dir[0]))
                crossings.append((a, b, fa, fb, sign))
    visits = []
    for s, (kind, f, c0, c1, slot) in enumerate(segs):
        here = []
        for cid, (a, b, x, y, sign) in enumerate(crossings):
            if kind == "v" and a == s:
                here.append((abs(y - c0), cid, OVER, sign))
            elif kind == "h" and b == s:
                here.append((abs(x - c0), cid, UNDER, sign))
        for _, cid, role, sign in sorted(here):
            visits.append((cid, role, sign))
    return kl.DiagramCode([visits])


def test_grid_sigma_equals_rho_matches_geometric_rederivation():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(3, 9))
        rho = tuple(int(x) for x in rng.permutation(n))
        d = kl.grid_to_diagram(kl.GridDiagram(rho=rho, sigma=rho))
        ref = geometric_grid_code(rho, rho)
        assert kl.validate_diagram(ref).ok
        assert ref.crossing_count == d.crossing_count
        assert kl.determinant(ref) == kl.determinant(d)
        assert kl.casson_c2(ref) == kl.casson_c2(d)


def test_petal_to_grid_conditioning_pattern():
    p = kl.PetalPermutation(heights=(2, 0, 4, 1, 3))
    g = kl.petal_to_grid(p)
    assert g.size == 5
    assert g.rho == (0, 2, 4, 1, 3)  # n*k mod (2n+1) with n=2
    assert g.sigma == p.heights


def test_petal_three_always_unknot():
    for heights in itertools.permutations(range(3)):
        d = kl.grid_to_diagram(kl.petal_to_grid(kl.PetalPermutation(heights)))
        assert kl.determinant(d) == 1
        assert kl.casson_c2(d) == 0


def test_petal_five_identity_trivial():
    d = kl.grid_to_diagram(kl.petal_to_grid(kl.PetalPermutation((0, 1, 2, 3, 4))))
    assert kl.casson_c2(d) == 0
    assert kl.determinant(d) == 1


def test_petal_even_count_rejected():
    with pytest.raises(ValueError):
        kl.PetalPermutation((0, 1, 2, 3))


def test_braid_single_letter_unknot():
    d = kl.braid_closure_to_diagram(kl.BraidWord(strands=2, letters=(1,)))
    assert d.crossing_count == 1
    assert d.component_count == 1
    assert kl.determinant(d) == 1


def test_braid_trefoil():
    d = kl.braid_closure_to_diagram(kl.BraidWord(strands=2, letters=(1, 1, 1)))
    assert kl.writhe(d) == 3
    assert kl.determinant(d) == 3
    assert kl.casson_c2(d) == 1


def test_braid_cancelling_pair_is_trivial_unlink():
    # sigma_1 sigma_1^-1 trace-closes to the 2-component unlink: the strand
    # permutation is the identity, so there are two components
    d = kl.braid_closure_to_diagram(kl.BraidWord(strands=2, letters=(1, -1)))
    assert d.crossing_count == 2
    assert kl.writhe(d) == 0
    assert d.component_count == 2
    assert kl.linking_number(d, 0, 1) == 0


def test_braid_crossing_count_and_writhe():
    rng = np.random.default_rng(5)
    for _ in range(50):
        m = int(rng.integers(2, 6))
        L = int(rng.integers(1, 12))
        letters = tuple(int(g) * int(s) for g, s in
                        zip(rng.integers(1, m, L), 1 - 2 * rng.integers(0, 2, L)))
        b = kl.BraidWord(strands=m, letters=letters)
        d = kl.braid_closure_to_diagram(b)
        assert d.crossing_count == L
        assert kl.writhe(d) == sum(np.sign(letters))
        assert kl.validate_diagram(d).ok


def test_braid_component_count_is_permutation_cycles():
    rng = np.random.default_rng(6)
    for _ in range(50):
        m = int(rng.integers(2, 6))
        L = int(rng.integers(1, 12))
        letters = tuple(int(g) * int(s) for g, s in
                        zip(rng.integers(1, m, L), 1 - 2 * rng.integers(0, 2, L)))
        d = kl.braid_closure_to_diagram(kl.BraidWord(strands=m, letters=letters))
        perm = list(range(m))
        for let in letters:
            i = abs(let) - 1
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
        seen, cycles = set(), 0
        for s in range(m):
            if s not in seen:
                cycles += 1
                while s not in seen:
                    seen.add(s)
                    s = perm.index(s)
        assert d.component_count == cycles


def test_plat_closure_trefoil():
    # plat closure of sigma_2^3 on 4 strands is a trefoil
    d = kl.braid_closure_to_diagram(
        kl.BraidWord(strands=4, letters=(2, 2, 2), closure=kl.Closure.PLAT))
    assert d.component_count == 1
    assert kl.validate_diagram(d).ok
    assert kl.determinant(d) == 3
    assert abs(kl.casson_c2(d)) == 1


def test_plat_odd_strands_rejected():
    with pytest.raises(ValueError):
        kl.BraidWord(strands=3, letters=(1,), closure=kl.Closure.PLAT)


def test_flat_torus_trefoil_and_unknot():
    d = kl.flat_torus_diagram(2, 3, [1, 1, 1])
    assert kl.casson_c2(d) == 1
    d = kl.flat_torus_diagram(2, 3, [1, -1, 1])
    assert kl.determinant(d) == 1


def test_flat_torus_sign_count_mismatch():
    with pytest.raises(ValueError):
        kl.flat_torus_diagram(3, 2, [1, 1, 1])


def test_flat_torus_components_match_cycle_oracle():
    d = kl.flat_torus_diagram(4, 9, [1] * 27)
    assert d.crossing_count == 27
    # strand permutation of (s1 s2 s3)^9: rotation by 9 mod 4 -> gcd cycles
    perm = list(range(4))
    for i in [(k % 3) + 1 for k in range(27)]:
        perm[i - 1], perm[i] = perm[i], perm[i - 1]
    seen, cycles = set(), 0
    for s in range(4):
        if s not in seen:
            cycles += 1
            while s not in seen:
                seen.add(s)
                s = perm.index(s)
    assert d.component_count == cycles


def test_mirror_involution_and_writhe():
    rng = np.random.default_rng(7)
    for _ in range(200):
        d = random_knot_diagram(rng)
        m = kl.mirror(d)
        assert kl.mirror(m) == d
        assert kl.writhe(m) == -kl.writhe(d)
    u = kl.DiagramCode([[]])
    assert kl.mirror(u) == u


def test_serialization_roundtrip():
    rng = np.random.default_rng(8)
    for _ in range(20):
        d = random_knot_diagram(rng)
        assert kl.DiagramCode.from_json(d.to_json()) == d
    link = kl.sample_petaluma_link([2, 4], 1)
    assert kl.DiagramCode.from_json(link.to_json()) == link


def test_dt_trefoil_and_figure_eight():
    d = kl.parse_dt([4, 6, 2])
    assert kl.validate_diagram(d).ok
    assert kl.determinant(d) == 3
    f8 = kl.parse_dt([4, 6, 8, 2])
    assert kl.determinant(f8) == 5
    assert kl.conway(f8).coeffs == {0: 1, 2: -1}  # C(z) = 1 - z^2


def test_dt_empty_is_unknot():
    d = kl.parse_dt([])
    assert d.crossing_count == 0
    assert kl.determinant(d) == 1


def test_dt_malformed():
    with pytest.raises(DTParseError):
        kl.parse_dt([4, 5, 2])  # odd entry
    with pytest.raises(DTParseError):
        kl.parse_dt([4, 4, 2])  # duplicate
    with pytest.raises(DTParseError):
        kl.parse_dt([4, 8, 2])  # out of range


def test_dt_roundtrip_through_export():
    rng = np.random.default_rng(9)
    done = 0
    while done < 10:
        d = random_knot_diagram(rng, kind="braid")
        if not 1 <= d.crossing_count <= 10:
            continue
        done += 1
        dt = kl.dt_code(d)
        d2 = kl.parse_dt(dt)
        assert kl.determinant(d2) == kl.determinant(d)
        assert kl.casson_c2(d2) == kl.casson_c2(d)


def test_dt_fixture_file_parses(dt_fixtures):
    assert len(dt_fixtures) >= 14
    names = {k.name for k in dt_fixtures}
    assert {"3_1", "4_1", "7_7", "8_19"} <= names
    for k in dt_fixtures:
        assert set(k.expected) == {"det", "c2"}


def test_petal_to_braid_roundtrip_exhaustive_s5():
    for heights in itertools.permutations(range(5)):
        p = kl.PetalPermutation(heights)
        ref = kl.grid_to_diagram(kl.petal_to_grid(p))
        b = kl.petal_to_braid(p)
        assert len(b.letters) == (b.strands - 1) * 5
        d = kl.braid_closure_to_diagram(b)
        assert d.component_count == 1
        assert kl.determinant(d) == kl.determinant(ref)
        assert kl.casson_c2(d) == kl.casson_c2(ref)
        assert kl.v3(d) == kl.v3(ref)


def test_petal_to_braid_roundtrip_samples():
    rng = np.random.default_rng(10)
    for petals in (7, 9, 11):
        for _ in range(6):
            p = kl.PetalPermutation(tuple(int(x) for x in rng.permutation(petals)))
            ref = kl.grid_to_diagram(kl.petal_to_grid(p))
            d = kl.braid_closure_to_diagram(kl.petal_to_braid(p))
            assert kl.determinant(d) == kl.determinant(ref)
            assert kl.casson_c2(d) == kl.casson_c2(ref)
            assert kl.v3(d) == kl.v3(ref)
