"""Invariant computations: formulas, polynomials, oracles, kernel twins."""

from fractions import Fraction

import numpy as np
import pytest

import knotlab as kl
from knotlab import _kernels_py as pure
from knotlab.backend import eval_terms as fast_eval_terms
from knotlab.diagram import OVER, UNDER
from knotlab.invariants import jones_c2, jones_v3
from knotlab.invariants.formulas import ArrowPattern, bundled_formula, eval_formula, load_formula
from knotlab.invariants.polynomial import IntPoly, LaurentPoly, _int_det

from conftest import random_knot_diagram


def trefoil():
    return kl.braid_closure_to_diagram(kl.BraidWord(strands=2, letters=(1, 1, 1)))


def unknot():
    return kl.DiagramCode([[]])


# -- writhe / linking number ----------------------------------------------------


def test_writhe_basics():
    assert kl.writhe(unknot()) == 0
    assert kl.writhe(trefoil()) == 3


def test_linking_split_diagram_zero():
    d = kl.DiagramCode([[(0, OVER, 1), (0, UNDER, 1)],
                        [(1, OVER, -1), (1, UNDER, -1)]])
    assert kl.linking_number(d, 0, 1) == 0
    assert kl.linking_number(d, 1, 0) == 0


def test_linking_hopf():
    d = kl.braid_closure_to_diagram(kl.BraidWord(strands=2, letters=(1, 1)))
    assert d.component_count == 2
    assert kl.linking_number(d, 0, 1) == 1
    assert kl.linking_number(d, 1, 0) == 1
    assert kl.linking_number(kl.mirror(d), 0, 1) == -1


def test_linking_errors():
    d = kl.braid_closure_to_diagram(kl.BraidWord(strands=2, letters=(1, 1)))
    with pytest.raises(ValueError):
        kl.linking_number(d, 0, 0)
    with pytest.raises(ValueError):
        kl.linking_number(d, 0, 2)


# -- formulas ---------------------------------------------------------------------


def test_formula_on_unknot_is_zero():
    for name in ("casson_c2", "v3", "defect"):
        assert eval_formula(bundled_formula(name), unknot()) == 0


def test_c2_formula_values():
    assert kl.casson_c2(trefoil()) == 1
    assert kl.casson_c2(kl.parse_dt([4, 6, 8, 2])) == -1


def test_formula_multi_component_rejected():
    d = kl.braid_closure_to_diagram(kl.BraidWord(strands=2, letters=(1, 1)))
    with pytest.raises(ValueError):
        kl.casson_c2(d)


def test_basepoint_independence():
    rng = np.random.default_rng(21)
    for _ in range(100):
        d = random_knot_diagram(rng)
        m = 2 * d.crossing_count
        bps = range(max(m, 1)) if m <= 16 else rng.integers(0, m, 6)
        for name in ("casson_c2", "v3", "defect"):
            f = bundled_formula(name)
            vals = {eval_formula(f, d, int(b)) for b in bps}
            assert len(vals) == 1, f"{name} basepoint-dependent"


def test_mirror_symmetries():
    rng = np.random.default_rng(22)
    for _ in range(100):
        d = random_knot_diagram(rng)
        m = kl.mirror(d)
        assert kl.casson_c2(m) == kl.casson_c2(d)
        assert kl.v3(m) == -kl.v3(d)
        assert kl.writhe(m) == -kl.writhe(d)


def test_formula_file_format_roundtrip(tmp_path):
    src = {
        "name": "custom",
        "order": 2,
        "version": 3,
        "terms": [
            {"coeff": "1/2", "endpoints": ["1t", "2h", "1h", "2t"],
             "signs": {"1": "+", "2": "any"}},
        ],
    }
    path = tmp_path / "f.json"
    import json
    path.write_text(json.dumps(src))
    f = load_formula(path)
    assert f.order == 2 and f.version == 3
    coeff, pat = f.terms[0]
    assert coeff == Fraction(1, 2)
    assert pat.signs == {"1": 1}
    val = eval_formula(f, trefoil())
    # the c2 pattern matches once on the trefoil (that is why c2 = 1)
    assert val == Fraction(1, 2)


def test_bad_patterns_rejected():
    with pytest.raises(ValueError):
        ArrowPattern(endpoints=(("1", True), ("1", True)), signs={})
    with pytest.raises(ValueError):
        ArrowPattern(endpoints=(("1", True), ("1", False)), signs={"2": 1})


# -- defect ----------------------------------------------------------------------


def test_defect_zero_crossing():
    assert kl.defect(unknot()) == 0


def test_defect_invariant_under_rerandomization():
    rng = np.random.default_rng(23)
    from knotlab.samplers import _rerandomize_crossings
    for _ in range(30):
        n = int(rng.integers(4, 9))
        g = kl.GridDiagram(tuple(int(x) for x in rng.permutation(n)),
                           tuple(int(x) for x in rng.permutation(n)))
        d = kl.grid_to_diagram(g)
        base = kl.defect(d)
        for _ in range(5):
            coins = rng.integers(0, 2, size=d.crossing_count)
            assert kl.defect(_rerandomize_crossings(d, coins)) == base


def test_defect_exact_coin_average_relation():
    # E over all 2^c crossing assignments of c2 equals defect/8, per curve
    rng = np.random.default_rng(24)
    from knotlab.samplers import _rerandomize_crossings
    done = 0
    while done < 8:
        n = int(rng.integers(4, 7))
        g = kl.GridDiagram(tuple(int(x) for x in rng.permutation(n)),
                           tuple(int(x) for x in rng.permutation(n)))
        d = kl.grid_to_diagram(g)
        c = d.crossing_count
        if not 2 <= c <= 10:
            continue
        done += 1
        total = 0
        for bits in range(1 << c):
            coins = np.array([(bits >> k) & 1 for k in range(c)], dtype=np.int64)
            total += kl.casson_c2(_rerandomize_crossings(d, coins))
        assert Fraction(total, 1 << c) == Fraction(kl.defect(d), 8)


# -- Alexander / Conway / determinant ---------------------------------------------


def test_alexander_unknot_and_normalization():
    assert kl.alexander(unknot()) == LaurentPoly({0: 1})
    a = kl.alexander(trefoil())
    assert a == LaurentPoly({-1: 1, 0: -1, 1: 1})
    assert sum(v for _, v in a.items()) == 1  # Delta(1) = 1


def test_conway_form():
    c = kl.conway(trefoil())
    assert isinstance(c, IntPoly)
    assert c[0] == 1
    assert c[2] == 1
    f8 = kl.parse_dt([4, 6, 8, 2])
    assert kl.conway(f8).coeffs == {0: 1, 2: -1}


def test_determinant_odd_for_knots():
    rng = np.random.default_rng(25)
    for _ in range(60):
        d = random_knot_diagram(rng)
        assert kl.determinant(d) % 2 == 1


def test_dual_oracle_equality_random():
    rng = np.random.default_rng(26)
    for _ in range(40):
        d = random_knot_diagram(rng)
        assert kl.conway(d)[2] == kl.casson_c2(d)


def test_fixture_knots_all_oracles(dt_fixtures):
    for k in dt_fixtures:
        d = kl.parse_dt(k.dt_code)
        assert kl.validate_diagram(d).ok
        det, c2 = k.expected["det"], k.expected["c2"]
        assert kl.determinant(d) == det, k.name
        assert kl.casson_c2(d) == c2, k.name
        assert kl.conway(d)[2] == c2, k.name
        if d.crossing_count <= 18:
            V = kl.jones_oracle(d)
            assert sum(v for _, v in V.items()) == 1, k.name           # V(1) = 1
            assert sum(e * v for e, v in V.items()) == 0, k.name       # V'(1) = 0
            assert jones_c2(d) == c2, k.name
            assert jones_v3(d) == kl.v3(d), k.name
            assert kl.determinant(d) == abs(V(Fraction(-1))), k.name   # |V(-1)| = det


def test_jones_guard():
    d = kl.grid_to_diagram(kl.petal_to_grid(
        kl.PetalPermutation(tuple(int(x) for x in np.random.default_rng(1).permutation(9)))))
    if d.crossing_count > 4:
        with pytest.raises(ValueError):
            kl.jones_oracle(d, max_crossings=4)


def test_jones_multi_component_rejected():
    d = kl.braid_closure_to_diagram(kl.BraidWord(strands=2, letters=(1, 1)))
    with pytest.raises(ValueError):
        kl.jones_oracle(d)


def test_v3_is_integral_on_fixtures(dt_fixtures):
    for k in dt_fixtures:
        v = kl.v3(kl.parse_dt(k.dt_code))
        assert v.denominator == 1


# -- kernel twins ------------------------------------------------------------------


def test_kernel_twins_agree_with_reference():
    rng = np.random.default_rng(27)
    pats = []
    for name in ("casson_c2", "v3", "defect"):
        pats += [p.encode() for _, p in bundled_formula(name).terms]
    # sign-constrained and order-1 variants
    pats.append((pats[0][0], pats[0][1], (1, -1)))
    pats.append((pats[0][0], pats[0][1], (0, 1)))
    pats.append((pats[3][0], pats[3][1], (1, 0, -1)))
    pats.append(((0, 0), (0, 1), (0,)))  # order-1: writhe of positive-first arrows
    for _ in range(25):
        d = random_knot_diagram(rng)
        t, h, s = d.arrow_arrays()
        a = list(fast_eval_terms(t, h, s, pats))
        b = list(pure.eval_terms(t, h, s, pats))
        ref = [pure.eval_term_reference(t, h, s, *p) for p in pats]
        assert a == b == ref


def test_same_gap_order3_pattern_kernels():
    # all three chords isolated: every counted arrow sits in a single gap,
    # exercising the ordered-table branch
    pat = ((0, 0, 1, 1, 2, 2), (0, 1, 0, 1, 0, 1), (0, 0, 0))
    rng = np.random.default_rng(28)
    for _ in range(15):
        d = random_knot_diagram(rng)
        t, h, s = d.arrow_arrays()
        a = fast_eval_terms(t, h, s, [pat])[0]
        b = pure.eval_terms(t, h, s, [pat])[0]
        ref = pure.eval_term_reference(t, h, s, *pat)
        assert a == b == ref


def test_determinant_paths_agree():
    rng = np.random.default_rng(29)
    for size, lo, hi in ((6, -3, 3), (12, -20, 20)):
        for _ in range(10):
            M = rng.integers(lo, hi, size=(size, size)).astype(np.int64)
            exact = pure.bareiss_det_int64(M)
            assert _int_det(M) == exact
    # force the CRT path with a big random matrix checked against python ints
    M = rng.integers(-9, 9, size=(60, 60)).astype(np.int64)
    assert _int_det(M) == pure.bareiss_det_int64(M)


def test_bracket_tally_twins():
    rng = np.random.default_rng(30)
    from knotlab import backend
    for _ in range(10):
        d = random_knot_diagram(rng)
        if d.crossing_count > 10:
            continue
        cids, roles, signs = d.component_arrays(0)
        c = d.crossing_count
        over_pos = np.zeros(c, dtype=np.int64)
        under_pos = np.zeros(c, dtype=np.int64)
        sg = np.zeros(c, dtype=np.int64)
        pos = np.arange(cids.size, dtype=np.int64)
        over = roles == OVER
        over_pos[cids[over]] = pos[over]
        under_pos[cids[~over]] = pos[~over]
        sg[cids] = signs
        assert np.array_equal(backend.bracket_tally(over_pos, under_pos, sg),
                              pure.bracket_tally(over_pos, under_pos, sg))
