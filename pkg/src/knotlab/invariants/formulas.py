"""Gauss-diagram (arrow) formulas: data model, JSON loader, evaluation.

A formula is a weighted list of arrow patterns; its value on a based knot
diagram is the sum over injective, order-preserving matchings of each
pattern into the diagram's arrows (tail = under visit, head = over visit)
of the product of the matched crossing signs, times the term coefficient.

The bundled c2 / v3 / defect pattern files live in ``data/`` and are pinned
by the polynomial oracles in the test suite, not by transcription; see
``tools/derive_formulas.py`` for the calibration script that regenerates
them from the Conway and Jones oracles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import numpy as np

from .. import backend
from ..diagram import DiagramCode

__all__ = ["ArrowPattern", "ArrowFormula", "load_formula", "bundled_formula", "eval_formula"]

_SIGN_WORDS = {"any": 0, "+": 1, "-": -1}
_SIGN_NAMES = {0: "any", 1: "+", -1: "-"}


@dataclass(frozen=True)
class ArrowPattern:
    """A based arrow diagram: 2k endpoint tokens in linear order.

    ``endpoints`` is a tuple of (arrow label, is_head) in the order the
    endpoints appear after the basepoint; ``signs`` maps each label to a
    sign constraint in {-1, 0 (any), +1}.
    """

    endpoints: tuple[tuple[str, bool], ...]
    signs: dict

    def __post_init__(self):
        per: dict[str, list[bool]] = {}
        for lab, is_head in self.endpoints:
            per.setdefault(lab, []).append(is_head)
        for lab, ends in per.items():
            if sorted(ends) != [False, True]:
                raise ValueError(f"arrow {lab} needs exactly one tail and one head")
        for lab in self.signs:
            if lab not in per:
                raise ValueError(f"sign constraint for unknown arrow {lab}")

    @property
    def order(self) -> int:
        return len(self.endpoints) // 2

    def encode(self):
        """(slot_arrow, slot_is_head, sign_con) in first-appearance labeling."""
        labels: dict[str, int] = {}
        slot_arrow = []
        slot_is_head = []
        for lab, is_head in self.endpoints:
            if lab not in labels:
                labels[lab] = len(labels)
            slot_arrow.append(labels[lab])
            slot_is_head.append(1 if is_head else 0)
        con = [0] * len(labels)
        for lab, s in self.signs.items():
            con[labels[lab]] = s
        return tuple(slot_arrow), tuple(slot_is_head), tuple(con)

    def reversed_arrow(self, label: str) -> "ArrowPattern":
        """Same pattern with one arrow's direction reversed."""
        eps = tuple((lab, (not ih) if lab == label else ih)
                    for lab, ih in self.endpoints)
        return ArrowPattern(endpoints=eps, signs=dict(self.signs))


@dataclass(frozen=True)
class ArrowFormula:
    """Weighted list of same-order arrow patterns."""

    name: str
    order: int
    terms: tuple[tuple[Fraction, ArrowPattern], ...]
    version: int = 1

    def __post_init__(self):
        for _, pat in self.terms:
            if pat.order != self.order:
                raise ValueError(
                    f"{self.name}: pattern order {pat.order} != formula order {self.order}")


def _parse_endpoint(tok: str) -> tuple[str, bool]:
    lab, mark = tok[:-1], tok[-1]
    if mark not in ("t", "h") or not lab:
        raise ValueError(f"bad endpoint token {tok!r}")
    return lab, mark == "h"


def load_formula(source) -> ArrowFormula:
    """Load a formula from a JSON file path, file object, or parsed dict."""
    if isinstance(source, dict):
        obj = source
    elif hasattr(source, "read"):
        obj = json.load(source)
    else:
        with open(source) as fh:
            obj = json.load(fh)
    terms = []
    for t in obj["terms"]:
        coeff = Fraction(t["coeff"])
        endpoints = tuple(_parse_endpoint(tok) for tok in t["endpoints"])
        signs = {lab: _SIGN_WORDS[word] for lab, word in t.get("signs", {}).items()
                 if _SIGN_WORDS[word] != 0}
        terms.append((coeff, ArrowPattern(endpoints=endpoints, signs=signs)))
    return ArrowFormula(name=obj["name"], order=int(obj["order"]),
                        terms=tuple(terms), version=int(obj.get("version", 1)))


@lru_cache(maxsize=None)
def bundled_formula(name: str) -> ArrowFormula:
    """Load one of the shipped formula files (casson_c2, v3, defect)."""
    ref = resources.files(__package__).joinpath(f"data/{name}.json")
    with ref.open() as fh:
        return load_formula(fh)


def eval_formula(formula: ArrowFormula, d: DiagramCode, basepoint: int = 0) -> Fraction:
    """Evaluate an arrow formula on a single-component diagram.

    ``basepoint`` is the edge position the circle is cut at (0..2c-1); genuine
    invariant formulas give the same value for every choice.  Worst case
    O(c^order).
    """
    if d.component_count != 1:
        raise ValueError("arrow formulas evaluate on single-component diagrams")
    tails, heads, signs = d.arrow_arrays()
    m = 2 * d.crossing_count
    if m and basepoint % m:
        b = basepoint % m
        tails = (tails - b) % m
        heads = (heads - b) % m
    encoded = [pat.encode() for _, pat in formula.terms]
    counts = backend.eval_terms(tails, heads, signs, encoded)
    total = Fraction(0)
    for (coeff, _), cnt in zip(formula.terms, counts):
        total += coeff * int(cnt)
    return total
