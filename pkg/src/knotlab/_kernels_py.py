"""Pure-Python twin of the compiled kernels in ``knotlab._kernels``.

Same call signatures and exact same results; selected at import time by
:mod:`knotlab.backend` when the compiled extension is unavailable (or when
``KNOTLAB_PURE=1``).  Hot loops use numpy where it helps, plain Python
elsewhere; arbitrary-precision integers make the determinant routines safe
at any size, just slow.
"""

from __future__ import annotations

import itertools

import numpy as np

KERNEL_KIND = "python"

_CHUNK = 256  # row chunk for the pairwise broadcasts


def eval_terms(tails, heads, signs, terms):
    """Weighted matching counts for arrow-diagram terms on one Gauss diagram.

    tails/heads: position (0..2c-1) of the under/over visit of each arrow,
    signs: crossing signs.  Each term is a tuple
    ``(slot_arrow, slot_is_head, sign_con)`` describing the 2k pattern
    endpoints in linear order and the per-arrow sign constraints
    (-1, 0=any, +1).  Returns one integer per term: the sum over
    order-preserving injective matchings of the product of matched signs.
    """
    t = np.asarray(tails, dtype=np.int64)
    h = np.asarray(heads, dtype=np.int64)
    s = np.asarray(signs, dtype=np.int64)
    out = []
    for slot_arrow, slot_is_head, sign_con in terms:
        order = len(sign_con)
        if order == 1:
            out.append(_eval1(t, h, s, slot_is_head, sign_con))
        elif order == 2:
            out.append(_eval2(t, h, s, slot_arrow, slot_is_head, sign_con))
        elif order == 3:
            out.append(_eval3(t, h, s, slot_arrow, slot_is_head, sign_con))
        else:
            out.append(eval_term_reference(t, h, s, slot_arrow, slot_is_head, sign_con))
    return out


def _weights(s, con):
    if con == 0:
        return s
    return np.where(s == con, s, 0)


def _eval1(t, h, s, slot_is_head, sign_con):
    first = h if slot_is_head[0] else t
    second = h if slot_is_head[1] else t
    w = _weights(s, sign_con[0])
    return int(w[first < second].sum())


def _slot_positions(t, h, slot_arrow, slot_is_head, which_arrow, along_axis):
    """Position vector for the slots of one pattern arrow, broadcast-ready."""
    pos = []
    for j, (a, ih) in enumerate(zip(slot_arrow, slot_is_head)):
        if a != which_arrow:
            pos.append(None)
            continue
        v = h if ih else t
        pos.append(v.reshape(-1, 1) if along_axis == 0 else v.reshape(1, -1))
    return pos


def _eval2(t, h, s, slot_arrow, slot_is_head, sign_con):
    c = len(t)
    if c < 2:
        return 0
    pa = _slot_positions(t, h, slot_arrow, slot_is_head, 0, 0)
    pb = _slot_positions(t, h, slot_arrow, slot_is_head, 1, 1)
    wa = _weights(s, sign_con[0]).reshape(-1, 1)
    wb = _weights(s, sign_con[1]).reshape(1, -1)
    total = 0
    for lo in range(0, c, _CHUNK):
        hi = min(lo + _CHUNK, c)
        ps = [pa[j][lo:hi] if pa[j] is not None else pb[j] for j in range(4)]
        cond = (ps[0] < ps[1]) & (ps[1] < ps[2]) & (ps[2] < ps[3])
        total += int((wa[lo:hi] * wb * cond).sum())
    return total


def _prefix_tables(t, h, s, ordered):
    """2D dominance tables over (tail pos, head pos); optionally T<H only."""
    m = 2 * len(t)
    ts = np.zeros((m + 1, m + 1), dtype=np.int64)
    tc = np.zeros((m + 1, m + 1), dtype=np.int64)
    if ordered:
        mask = t < h
        ti, hi, si = t[mask], h[mask], s[mask]
    else:
        ti, hi, si = t, h, s
    ts[ti + 1, hi + 1] = si
    tc[ti + 1, hi + 1] = 1
    ts.cumsum(axis=0, out=ts)
    ts.cumsum(axis=1, out=ts)
    tc.cumsum(axis=0, out=tc)
    tc.cumsum(axis=1, out=tc)
    return ts, tc


def _third_arrow_slots(slot_arrow, e3):
    """(slot index, is-lower-neighbor slot, is-upper) bounds for e3's slots.

    For each of e3's two slots returns (neighbor slot index below or None,
    neighbor above or None) among the other arrows' slots.
    """
    others = [j for j, a in enumerate(slot_arrow) if a != e3]
    mine = [j for j, a in enumerate(slot_arrow) if a == e3]
    bounds = []
    for j in mine:
        below = [o for o in others if o < j]
        above = [o for o in others if o > j]
        bounds.append((max(below) if below else None, min(above) if above else None))
    return mine, bounds


def _eval3(t, h, s, slot_arrow, slot_is_head, sign_con):
    c = len(t)
    if c < 3:
        return 0
    # pick the counted arrow e3: prefer one whose two slots sit in different
    # gaps of the other four; otherwise the ordered tables handle it.
    choice = None
    for e3 in (0, 1, 2):
        mine, bounds = _third_arrow_slots(slot_arrow, e3)
        same_gap = bounds[0] == bounds[1]
        if choice is None or (choice[3] and not same_gap):
            choice = (e3, mine, bounds, same_gap)
    e3, mine, bounds, same_gap = choice
    e1, e2 = [a for a in (0, 1, 2) if a != e3]

    ts, tc = _prefix_tables(t, h, s, ordered=False)
    if same_gap:
        tos, toc = _prefix_tables(t, h, s, ordered=True)

    m = 2 * c
    # slots of e1/e2 in linear order, with the e3 slots removed
    pair_slots = [j for j in range(6) if slot_arrow[j] != e3]
    wa = _weights(s, sign_con[e1]).reshape(-1, 1)
    wb = _weights(s, sign_con[e2]).reshape(1, -1)
    con3 = sign_con[e3]

    tail_slot = mine[0] if not slot_is_head[mine[0]] else mine[1]
    head_slot = mine[1] if tail_slot == mine[0] else mine[0]
    tail_bounds = bounds[0] if tail_slot == mine[0] else bounds[1]
    head_bounds = bounds[1] if tail_slot == mine[0] else bounds[0]

    total = 0
    for lo in range(0, c, _CHUNK):
        hi = min(lo + _CHUNK, c)
        nrow = hi - lo
        pos = {}
        for j in pair_slots:
            a, ih = slot_arrow[j], slot_is_head[j]
            v = h if ih else t
            pos[j] = (v[lo:hi].reshape(-1, 1) if a == e1 else v.reshape(1, -1))
        ordered_ok = None
        prev = None
        for j in pair_slots:
            if prev is not None:
                cmpv = prev < pos[j]
                ordered_ok = cmpv if ordered_ok is None else (ordered_ok & cmpv)
            prev = pos[j]
        w = wa[lo:hi] * wb * ordered_ok

        def bound_arrays(bnd):
            lo_b, hi_b = bnd
            lov = (np.broadcast_to(pos[lo_b] + 1, (nrow, c)) if lo_b is not None
                   else np.zeros((nrow, c), dtype=np.int64))
            hiv = (np.broadcast_to(pos[hi_b], (nrow, c)) if hi_b is not None
                   else np.full((nrow, c), m, dtype=np.int64))
            return lov, hiv

        tlo, thi = bound_arrays(tail_bounds)
        hlo, hhi = bound_arrays(head_bounds)

        def rect(tab):
            return (tab[thi, hhi] - tab[tlo, hhi] - tab[thi, hlo] + tab[tlo, hlo])

        if not same_gap:
            if con3 == 0:
                cnt = rect(ts)
            elif con3 == 1:
                cnt = (rect(tc) + rect(ts)) // 2
            else:
                cnt = -(rect(tc) - rect(ts)) // 2
        else:
            # both free slots in one gap: orientation within the gap matters
            want_t_first = tail_slot < head_slot
            if con3 == 0:
                full, ord_ = rect(ts), rect(tos)
            elif con3 == 1:
                full, ord_ = (rect(tc) + rect(ts)) // 2, (rect(toc) + rect(tos)) // 2
            else:
                full, ord_ = -(rect(tc) - rect(ts)) // 2, -(rect(toc) - rect(tos)) // 2
            cnt = ord_ if want_t_first else (full - ord_)
        total += int((w * cnt).sum())
    return total


def eval_term_reference(t, h, s, slot_arrow, slot_is_head, sign_con):
    """Brute-force matcher, O(c^k k!); the oracle the fast paths are tested against."""
    c = len(t)
    k = len(sign_con)
    total = 0
    for combo in itertools.permutations(range(c), k):
        ok = True
        prev = -1
        for a, ih in zip(slot_arrow, slot_is_head):
            p = (h if ih else t)[combo[a]]
            if p <= prev:
                ok = False
                break
            prev = p
        if not ok:
            continue
        w = 1
        for a in range(k):
            sa = int(s[combo[a]])
            if sign_con[a] != 0 and sa != sign_con[a]:
                w = 0
                break
            w *= sa
        total += w
    return total


def bracket_tally(over_pos, under_pos, signs):
    """Kauffman-bracket state census.

    Returns int64 array N[(a_minus_b + c), loops] counting smoothing states by
    their A-exponent and number of loops.  over_pos/under_pos give the visit
    positions of each crossing; edges are the 2c arcs between consecutive
    visits.  The A-smoothing of a positive crossing joins (under-in, over-out)
    and (over-in, under-out); for a negative crossing the pairings swap.
    """
    o = list(map(int, over_pos))
    u = list(map(int, under_pos))
    sg = list(map(int, signs))
    c = len(o)
    m = 2 * c
    if c == 0:
        return np.zeros((1, 2), dtype=np.int64)
    n_tab = np.zeros((2 * c + 1, c + 2), dtype=np.int64)
    for state in range(1 << c):
        parent = list(range(m))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x
        a_minus_b = 0
        for cid in range(c):
            oo, uu = o[cid], u[cid]
            oi, o_out = (oo - 1) % m, oo
            ui, u_out = (uu - 1) % m, uu
            use_a = not ((state >> cid) & 1)
            a_minus_b += 1 if use_a else -1
            if use_a == (sg[cid] > 0):
                pairs = ((ui, o_out), (oi, u_out))
            else:
                pairs = ((ui, oi), (u_out, o_out))
            for x, y in pairs:
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[rx] = ry
        loops = sum(1 for x in range(m) if find(x) == x)
        n_tab[a_minus_b + c, loops] += 1
    return n_tab


def bareiss_det_int64(matrix):
    """Exact determinant of an integer matrix.

    Python integers are unbounded, so unlike the compiled twin this version
    is safe for any magnitude; the name records the shared contract (callers
    only use it when intermediates fit in 64 bits).
    """
    M = [[int(x) for x in row] for row in matrix]
    n = len(M)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            row_i = M[i]
            row_k = M[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pk - mik * row_k[j]) // prev
        prev = pk
    return sign * M[n - 1][n - 1]


def det_mod(matrix, p):
    """Determinant modulo a prime p via Gaussian elimination."""
    M = [[int(x) % p for x in row] for row in matrix]
    n = len(M)
    det = 1
    for k in range(n):
        piv = None
        for i in range(k, n):
            if M[i][k] % p:
                piv = i
                break
        if piv is None:
            return 0
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            det = -det
        pk = M[k][k]
        det = (det * pk) % p
        inv = pow(pk, p - 2, p)
        for i in range(k + 1, n):
            f = (M[i][k] * inv) % p
            if f:
                row_i, row_k = M[i], M[k]
                for j in range(k, n):
                    row_i[j] = (row_i[j] - f * row_k[j]) % p
    return det % p
