"""Derive the bundled arrow-formula data files from the polynomial oracles.

The c2 pattern is found by scanning all based 2-arrow patterns for the one
matching the Conway z^2 coefficient; the v3 terms are solved exactly (sympy,
rationals) from the Jones-expansion values over a few hundred (diagram,
basepoint) equations; the defect terms are the four direction-completions of
the c2 pattern weighted so that averaging c2 over all crossing assignments
of a fixed curve equals defect/8.

Run from the repository root:  python tools/derive_formulas.py
Requires sympy (development-time only).
"""

import itertools
import json
import pathlib
import sys
from fractions import Fraction

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

import knotlab as kl
from knotlab.backend import eval_terms
from knotlab.invariants import jones_v3
from knotlab.invariants.formulas import ArrowFormula, ArrowPattern, eval_formula

DATA = pathlib.Path(__file__).resolve().parents[1] / "src" / "knotlab" / "invariants" / "data"


def corpus(seed=11, max_crossings=9, size=90):
    rng = np.random.default_rng(seed)
    out = [
        kl.braid_closure_to_diagram(kl.BraidWord(2, tuple([1] * k))) for k in (3, 5, 7)
    ]
    out += [kl.braid_closure_to_diagram(kl.BraidWord(2, tuple([-1] * k))) for k in (3, 5)]
    out.append(kl.braid_closure_to_diagram(kl.BraidWord(3, (1, -2, 1, -2))))
    out.append(kl.braid_closure_to_diagram(kl.BraidWord(3, (1, 2, 1, 2, 1, 2, 1, 2))))
    while len(out) < size * 2 // 3:
        m = int(rng.integers(2, 5))
        L = int(rng.integers(3, 10))
        letters = [int(g) * int(s) for g, s in
                   zip(rng.integers(1, m, L), 1 - 2 * rng.integers(0, 2, L))]
        d = kl.braid_closure_to_diagram(kl.BraidWord(m, tuple(letters)))
        if d.component_count == 1 and 1 <= d.crossing_count <= max_crossings:
            out.append(d)
    while len(out) < size:
        n = int(rng.integers(3, 7))
        g = kl.GridDiagram(tuple(int(x) for x in rng.permutation(n)),
                           tuple(int(x) for x in rng.permutation(n)))
        d = kl.grid_to_diagram(g)
        if d.crossing_count <= max_crossings + 1:
            out.append(d)
    for _ in range(10):
        p = kl.PetalPermutation(tuple(int(x) for x in rng.permutation(5)))
        out.append(kl.grid_to_diagram(kl.petal_to_grid(p)))
    for _ in range(6):
        p = kl.PetalPermutation(tuple(int(x) for x in rng.permutation(7)))
        out.append(kl.grid_to_diagram(kl.petal_to_grid(p)))
    return out


def all_patterns(order):
    """All based arrow patterns with `order` arrows, first-appearance labeled."""
    def pairings(points):
        if not points:
            yield []
            return
        a = points[0]
        for i in range(1, len(points)):
            b = points[i]
            rest = [p for p in points[1:] if p != b]
            for sub in pairings(rest):
                yield [(a, b)] + sub

    pats = set()
    for pairing in pairings(list(range(2 * order))):
        for dirs in itertools.product((0, 1), repeat=order):
            slots = [None] * (2 * order)
            for lab, ((a, b), dflag) in enumerate(zip(pairing, dirs)):
                slots[a] = (lab, dflag == 1)
                slots[b] = (lab, dflag == 0)
            relab, word = {}, []
            for lab, is_head in slots:
                if lab not in relab:
                    relab[lab] = len(relab)
                word.append((relab[lab], is_head))
            pats.add(tuple(word))
    return sorted(pats)


def encode(word):
    return (tuple(lab for lab, _ in word),
            tuple(1 if ih else 0 for _, ih in word),
            tuple(0 for _ in range(len(word) // 2)))


def counts_for(d, basepoint, words):
    tails, heads, signs = d.arrow_arrays()
    m = 2 * d.crossing_count
    if m:
        tails = (tails - basepoint) % m
        heads = (heads - basepoint) % m
    return eval_terms(tails, heads, signs, [encode(w) for w in words])


def word_to_endpoints(word):
    return [f"{lab + 1}{'h' if is_head else 't'}" for lab, is_head in word]


def derive_c2():
    words = all_patterns(2)
    diagrams = corpus(seed=7, size=70)
    targets = [kl.conway(d)[2] for d in diagrams]
    hits = []
    for w in words:
        ok = True
        for d, tgt in zip(diagrams, targets):
            m = 2 * d.crossing_count
            for b in {0, m // 3, m // 2} if m else {0}:
                if counts_for(d, b, [w])[0] != tgt:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            hits.append(w)
    print("c2 single-pattern candidates:", hits)
    chosen = sorted(hits)[-1]  # the tail-first variant, frozen
    return chosen


def derive_v3():
    import sympy as sp

    words = all_patterns(3)
    diagrams = corpus(seed=11, size=90)
    rows, rhs = [], []
    for d in diagrams:
        m = 2 * d.crossing_count
        tgt = jones_v3(d)
        bps = sorted({0, m // 5, m // 3, m // 2, (2 * m) // 3}) if m else [0]
        for b in bps:
            rows.append(counts_for(d, b, words))
            rhs.append(sp.Rational(tgt.numerator, tgt.denominator))
    M = sp.Matrix(rows)
    y = sp.Matrix(rhs)
    sol, params = M.gauss_jordan_solve(y)
    part = sol.subs({p: 0 for p in params})
    terms = [(Fraction(int(part[i].p), int(part[i].q)), words[i])
             for i in range(len(words)) if part[i] != 0]
    print(f"v3 solved: {len(terms)} terms over {len(rows)} equations")
    for cf, w in terms:
        print("  ", cf, word_to_endpoints(w))
    return terms


def derive_defect(c2_word):
    def reverse(word, lab):
        return tuple((l, (not ih) if l == lab else ih) for l, ih in word)

    return [
        (Fraction(2), c2_word),
        (Fraction(-2), reverse(c2_word, 0)),
        (Fraction(-2), reverse(c2_word, 1)),
        (Fraction(2), reverse(reverse(c2_word, 0), 1)),
    ]


def write_formula(path, name, order, terms, comment):
    obj = {
        "name": name,
        "version": 1,
        "order": order,
        "comment": comment,
        "terms": [
            {"coeff": f"{cf.numerator}" if cf.denominator == 1 else f"{cf.numerator}/{cf.denominator}",
             "endpoints": word_to_endpoints(w),
             "signs": {}}
            for cf, w in terms
        ],
    }
    path.write_text(json.dumps(obj, indent=2) + "\n")
    print("wrote", path)


def verify(name):
    from knotlab.invariants.formulas import bundled_formula
    from knotlab.invariants import jones_c2

    diagrams = corpus(seed=999, max_crossings=11, size=40)
    f = bundled_formula(name)
    for d in diagrams:
        m = 2 * d.crossing_count
        vals = {eval_formula(f, d, b) for b in range(max(m, 1))}
        if name == "casson_c2":
            assert vals == {Fraction(kl.conway(d)[2])}, d
            assert jones_c2(d) == next(iter(vals))
        elif name == "v3":
            assert vals == {jones_v3(d)}, d
            assert eval_formula(f, kl.mirror(d)) == -next(iter(vals))
    print(f"{name}: verified on fresh corpus, all basepoints")


def main():
    c2_word = derive_c2()
    write_formula(DATA / "casson_c2.json", "casson_c2", 2, [(Fraction(1), c2_word)],
                  "Order-2 knot invariant (coefficient of z^2 in the Conway polynomial). "
                  "Derived and pinned against the Conway and Jones oracles; regenerate "
                  "with tools/derive_formulas.py.")
    v3_terms = derive_v3()
    write_formula(DATA / "v3.json", "v3", 3, v3_terms,
                  "Order-3 knot invariant normalized so that V(e^{ih}) = 1 + 3 c2 h^2 "
                  "+ 6 v3 h^3 i + O(h^4). Solved exactly against the Jones oracle and "
                  "validated out of sample; regenerate with tools/derive_formulas.py.")
    write_formula(DATA / "defect.json", "defect", 2, derive_defect(c2_word),
                  "First-order invariant of the underlying (sign-ignored) curve: the "
                  "direction-completion of the c2 pattern, weighted so that averaging "
                  "c2 over all 2^c over/under assignments of a fixed curve gives "
                  "defect/8 exactly. Invariant under crossing re-randomization.")
    import knotlab.invariants.formulas as fm
    fm.bundled_formula.cache_clear()
    verify("casson_c2")
    verify("v3")


if __name__ == "__main__":
    main()
