"""Diagram invariants: writhe, linking numbers, finite-type formulas, polynomials."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..diagram import OVER, DiagramCode
from .formulas import ArrowFormula, ArrowPattern, bundled_formula, eval_formula, load_formula
from .polynomial import IntPoly, LaurentPoly, alexander, conway, determinant, jones_oracle

__all__ = [
    "ArrowFormula",
    "ArrowPattern",
    "IntPoly",
    "LaurentPoly",
    "alexander",
    "conway",
    "casson_c2",
    "defect",
    "determinant",
    "eval_formula",
    "bundled_formula",
    "load_formula",
    "jones_oracle",
    "jones_c2",
    "jones_v3",
    "linking_number",
    "v3",
    "writhe",
]


def writhe(d: DiagramCode) -> int:
    """Sum of crossing signs (each crossing counted once, via its over visit)."""
    total = 0
    for i in range(d.component_count):
        _, roles, signs = d.component_arrays(i)
        total += int(signs[roles == OVER].sum())
    return total


def linking_number(d: DiagramCode, i: int, j: int) -> int:
    """Half the signed count of crossings between components i and j."""
    if i == j:
        raise ValueError("linking number needs two distinct components")
    k = d.component_count
    if not (0 <= i < k and 0 <= j < k):
        raise ValueError(f"component index out of range (diagram has {k})")
    ci, _, si = d.component_arrays(i)
    cj, _, _ = d.component_arrays(j)
    other = set(cj.tolist())
    own = {}
    for c in ci.tolist():
        own[c] = own.get(c, 0) + 1
    total = 0
    for c, s in zip(ci.tolist(), si.tolist()):
        if own[c] == 1 and c in other:
            total += s
    if total % 2:
        raise ValueError("odd inter-component sign sum: diagram is not realizable")
    return total // 2


def casson_c2(d: DiagramCode) -> int:
    """Casson invariant: coefficient of z^2 in the Conway polynomial."""
    val = eval_formula(bundled_formula("casson_c2"), d)
    if val.denominator != 1:
        raise ArithmeticError(f"c2 formula returned non-integer {val}")
    return int(val)


def v3(d: DiagramCode) -> Fraction:
    """Order-three invariant from the Jones expansion (integer-valued in practice)."""
    return eval_formula(bundled_formula("v3"), d)


def defect(d: DiagramCode) -> int:
    """First-order invariant of the underlying curve; E[c2] = E[defect]/8 under coin flips."""
    val = eval_formula(bundled_formula("defect"), d)
    if val.denominator != 1:
        raise ArithmeticError(f"defect formula returned non-integer {val}")
    return int(val)


def jones_c2(d: DiagramCode, max_crossings: int = 18) -> Fraction:
    """c2 from the Jones oracle: -sum_k a_k k^2 / 6."""
    V = jones_oracle(d, max_crossings)
    return Fraction(-sum(v * k * k for k, v in V.items()), 6)


def jones_v3(d: DiagramCode, max_crossings: int = 18) -> Fraction:
    """v3 from the Jones oracle: -sum_k a_k k^3 / 36."""
    V = jones_oracle(d, max_crossings)
    return Fraction(-sum(v * k ** 3 for k, v in V.items()), 36)
