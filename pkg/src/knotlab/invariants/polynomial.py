"""Alexander-Conway polynomial, determinant, and the Kauffman-bracket Jones oracle.

The Alexander matrix has one row per crossing over the diagram's arcs
(broken at under-visits): a positive crossing contributes
t*x_in - x_out + (1-t)*x_over, a negative one x_in - t*x_out + (t-1)*x_over.
One row and column are deleted and the determinant is computed exactly:
integer evaluations at small points (fraction-free Bareiss, with a CRT
fallback past the int64 Hadamard bound) followed by exact interpolation.

The Jones oracle is the exponential 2^c Kauffman state sum, guarded by
``max_crossings``; it exists to pin the fast Gauss-diagram formulas.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from fractions import Fraction

import numpy as np

from .. import backend
from ..diagram import OVER, UNDER, DiagramCode

__all__ = [
    "LaurentPoly",
    "IntPoly",
    "alexander",
    "conway",
    "determinant",
    "jones_oracle",
]


class LaurentPoly:
    """Sparse Laurent polynomial with exact integer coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict):
        self.coeffs = {int(e): int(v) for e, v in coeffs.items() if v != 0}

    def __getitem__(self, e: int) -> int:
        return self.coeffs.get(e, 0)

    def items(self):
        return sorted(self.coeffs.items())

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.items()))

    def __call__(self, x: Fraction) -> Fraction:
        x = Fraction(x)
        return sum((Fraction(v) * x ** e for e, v in self.coeffs.items()), Fraction(0))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e, v in self.items():
            if e == 0:
                parts.append(f"{v:+d}")
            else:
                parts.append(f"{v:+d}*t^{e}")
        return "".join(parts).lstrip("+")


class IntPoly(LaurentPoly):
    """Polynomial with non-negative exponents (Conway normal form)."""

    def __init__(self, coeffs: dict):
        super().__init__(coeffs)
        if any(e < 0 for e in self.coeffs):
            raise ValueError("IntPoly exponents must be non-negative")


# -- small primes for the CRT determinant path --------------------------------


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _primes_30bit(count: int) -> list[int]:
    out = []
    n = (1 << 30) - 1
    while len(out) < count:
        if _is_prime(n):
            out.append(n)
        n -= 2
    return out


_PRIMES = _primes_30bit(96)


def _hadamard_bits(M: np.ndarray) -> float:
    norms = np.sqrt((M.astype(np.float64) ** 2).sum(axis=1))
    return float(np.log2(np.maximum(norms, 2.0)).sum())


def _int_det(M: np.ndarray) -> int:
    """Exact determinant of an integer matrix of any size."""
    n = M.shape[0]
    if n == 0:
        return 1
    bits = _hadamard_bits(M)
    # Bareiss multiplies two minors before the exact division, so int64
    # safety needs 2*bits + 1 < 63
    if bits <= 30:
        return int(backend.bareiss_det_int64(M))
    need = int(bits) + 2
    prod = 1
    residues = []
    mods = []
    for p in _PRIMES:
        residues.append(int(backend.det_mod(M, p)))
        mods.append(p)
        prod *= p
        if prod.bit_length() > need + 1:
            break
    else:
        raise ValueError("matrix too large for the CRT prime pool")
    x = 0
    for r, p in zip(residues, mods):
        q = prod // p
        x += r * q * pow(q, -1, p)
    x %= prod
    if x > prod // 2:
        x -= prod
    return x


# -- Alexander matrix ----------------------------------------------------------


def _crossing_rows(d: DiagramCode):
    """Per-crossing (sign, in_arc, out_arc, over_arc) for a knot diagram."""
    if d.component_count != 1:
        raise ValueError("Alexander matrix needs a single-component diagram")
    cids, roles, signs = d.component_arrays(0)
    c = d.crossing_count
    under_positions = sorted(int(p) for p in np.nonzero(roles == UNDER)[0])
    n_arcs = len(under_positions)

    def arc_of(p: int) -> int:
        return bisect_left(under_positions, p) % n_arcs

    over_pos: dict[int, int] = {}
    under_pos: dict[int, int] = {}
    sign_of: dict[int, int] = {}
    for p, (cid, role, sg) in enumerate(zip(cids.tolist(), roles.tolist(), signs.tolist())):
        if role == OVER:
            over_pos[cid] = p
        else:
            under_pos[cid] = p
        sign_of[cid] = sg
    rows = []
    for cid in range(c):
        u = under_pos[cid]
        k = bisect_left(under_positions, u)
        rows.append((sign_of[cid], arc_of(u), (k + 1) % n_arcs, arc_of(over_pos[cid])))
    return rows


def _alexander_matrix_at(rows, c: int, t: int) -> np.ndarray:
    M = np.zeros((c, c), dtype=np.int64)
    for k, (sg, a_in, a_out, a_over) in enumerate(rows):
        if sg > 0:
            M[k, a_in] += t
            M[k, a_out] += -1
            M[k, a_over] += 1 - t
        else:
            M[k, a_in] += 1
            M[k, a_out] += -t
            M[k, a_over] += t - 1
    return M


def _interpolate(xs: list[int], ys: list[int]) -> list[int]:
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        num = [Fraction(1)]
        den = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            new = [Fraction(0)] * (len(num) + 1)
            for k, cf in enumerate(num):
                new[k] += cf * (-xs[j])
                new[k + 1] += cf
            num = new
            den *= xs[i] - xs[j]
        w = Fraction(ys[i]) / den
        for k in range(len(num)):
            coeffs[k] += num[k] * w
    out = []
    for cf in coeffs:
        if cf.denominator != 1:
            raise ArithmeticError("non-integer interpolation result")
        out.append(int(cf))
    return out


def alexander(d: DiagramCode) -> LaurentPoly:
    """Normalized Alexander polynomial: symmetric exponents, Delta(1) = 1."""
    c = d.crossing_count
    if d.component_count != 1:
        raise ValueError("alexander() is defined for knots (one component)")
    if c <= 1:
        return LaurentPoly({0: 1})
    rows = _crossing_rows(d)
    npts = c  # minor determinant has degree <= c - 1
    pts = [p - (npts - 1) // 2 for p in range(npts)]
    vals = []
    for t in pts:
        M = _alexander_matrix_at(rows, c, t)
        vals.append(_int_det(M[1:, 1:]))
    coeffs = _interpolate(pts, vals)
    poly = {e: v for e, v in enumerate(coeffs) if v != 0}
    if not poly:
        raise ValueError("vanishing Alexander determinant: not a knot code")
    lo = min(poly)
    poly = {e - lo: v for e, v in poly.items()}
    d1 = sum(poly.values())
    if abs(d1) != 1:
        raise ValueError(f"Delta(1) = {d1}: diagram is not a realizable knot code")
    if d1 < 0:
        poly = {e: -v for e, v in poly.items()}
    deg = max(poly)
    if deg % 2:
        raise ValueError("odd-degree Alexander polynomial: inconsistent diagram")
    half = deg // 2
    sym = {e - half: v for e, v in poly.items()}
    for e, v in sym.items():
        if sym.get(-e, 0) != v:
            raise ValueError("non-palindromic Alexander polynomial: inconsistent diagram")
    return LaurentPoly(sym)


def conway(d: DiagramCode) -> IntPoly:
    """Conway normal form C(z) with C(0) = 1; z^2 = t + 1/t - 2."""
    sym = alexander(d)
    deg = max((e for e in sym.coeffs), default=0)
    # s_k(u) = t^k + t^-k as a polynomial in u = z^2
    s_prev = [2]            # s_0
    s_cur = [2, 1]          # s_1 = u + 2
    out = [0] * (deg + 1)
    out[0] += sym[0]
    for k in range(1, deg + 1):
        ak = sym[k]
        if ak:
            for j, cf in enumerate(s_cur[: k + 1]):
                out[j] += ak * cf
        if k < deg:
            # s_{k+1} = (u + 2) s_k - s_{k-1}
            nxt = [0] * (k + 2)
            for j, cf in enumerate(s_cur):
                nxt[j] += 2 * cf
                nxt[j + 1] += cf
            for j, cf in enumerate(s_prev):
                nxt[j] -= cf
            s_prev, s_cur = s_cur, nxt
    return IntPoly({2 * j: v for j, v in enumerate(out) if v})


def determinant(d: DiagramCode) -> int:
    """Knot determinant |Delta(-1)|, computed directly at t = -1."""
    c = d.crossing_count
    if d.component_count != 1:
        raise ValueError("determinant() is defined for knots (one component)")
    if c <= 1:
        return 1
    rows = _crossing_rows(d)
    M = _alexander_matrix_at(rows, c, -1)
    return abs(_int_det(M[1:, 1:]))


# -- Jones oracle --------------------------------------------------------------


def jones_oracle(d: DiagramCode, max_crossings: int = 18) -> LaurentPoly:
    """Jones polynomial V(t) from the Kauffman bracket state sum.

    Exponential in the crossing number by design (this is the oracle the
    polynomial-time formulas are checked against); refuses diagrams with
    more than ``max_crossings`` crossings.  Knots only.
    """
    if d.component_count != 1:
        raise ValueError("jones_oracle() is defined for knots (one component)")
    c = d.crossing_count
    if c > max_crossings:
        raise ValueError(f"{c} crossings exceeds the oracle guard ({max_crossings})")
    if c == 0:
        return LaurentPoly({0: 1})
    cids, roles, signs = d.component_arrays(0)
    over_pos = np.zeros(c, dtype=np.int64)
    under_pos = np.zeros(c, dtype=np.int64)
    sg = np.zeros(c, dtype=np.int64)
    pos = np.arange(cids.size, dtype=np.int64)
    over = roles == OVER
    over_pos[cids[over]] = pos[over]
    under_pos[cids[~over]] = pos[~over]
    sg[cids] = signs
    tally = backend.bracket_tally(over_pos, under_pos, sg)

    w = int(sg.sum())
    acc: dict[int, int] = {}
    for a_idx in range(tally.shape[0]):
        for loops in range(tally.shape[1]):
            n = int(tally[a_idx, loops])
            if n == 0:
                continue
            a_minus_b = a_idx - c
            dpow = loops - 1
            for k in range(dpow + 1):
                e = a_minus_b + 2 * (dpow - k) - 2 * k
                acc[e] = acc.get(e, 0) + n * ((-1) ** dpow) * math.comb(dpow, k)
    out: dict[int, int] = {}
    parity = -1 if w % 2 else 1
    for e, v in acc.items():
        if v:
            out[e - 3 * w] = out.get(e - 3 * w, 0) + v * parity
    res: dict[int, int] = {}
    for e, v in out.items():
        if v == 0:
            continue
        if e % 4:
            raise ArithmeticError("bracket exponent not divisible by 4 on a knot")
        res[-e // 4] = v
    return LaurentPoly(res)
