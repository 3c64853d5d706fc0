# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: arrow-pattern counting, bracket state sums, determinants.

Exact mirror of knotlab._kernels_py (same signatures, same results); see
that module for the semantics.  Pattern counting enumerates all but one
pattern arrow and counts the last one with 2D dominance tables indexed by
(tail rank, head rank), which keeps the tables cache-resident.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc
from libc.string cimport memset

cnp.import_array()

KERNEL_KIND = "compiled"

ctypedef long long i64

cdef int PAIR_LOOP_MAX = 96  # below this, the plain O(c^2) pair loop beats the tables


cdef inline i64 _weight(i64 s, int con) noexcept nogil:
    if con == 0:
        return s
    if s == con:
        return s
    return 0


cdef struct Tables:
    int* ts        # signed dominance table, (c+1)^2, rank space
    int* tc        # count dominance table
    int* tos       # signed, tail-before-head arrows only (lazy)
    int* toc       # count, tail-before-head arrows only (lazy)
    i64* nt        # position -> number of tails at positions < p  (size 2c+1)
    i64* nh        # position -> number of heads at positions < p
    int c


cdef void _prefix2d(int* tab, int stride) noexcept nogil:
    cdef int i, j
    cdef int* row
    cdef int* prev
    for j in range(1, stride):
        tab[j] += tab[j - 1]
    for i in range(1, stride):
        row = tab + i * stride
        prev = tab + (i - 1) * stride
        for j in range(1, stride):
            row[j] += row[j - 1] + prev[j] - prev[j - 1]


cdef int _build_tables(Tables* tb, i64[::1] t, i64[::1] h, i64[::1] s,
                       int c, bint ordered) except -1:
    cdef int m = 2 * c
    cdef int stride = c + 1
    cdef int* ts
    cdef int* tc
    cdef int a, i
    cdef i64* tr = <i64*> malloc(c * sizeof(i64))
    cdef i64* hr = <i64*> malloc(c * sizeof(i64))
    if not (tr and hr):
        free(tr); free(hr)
        raise MemoryError
    try:
        if tb.nt == NULL:
            tb.nt = <i64*> malloc((m + 1) * sizeof(i64))
            tb.nh = <i64*> malloc((m + 1) * sizeof(i64))
            if not (tb.nt and tb.nh):
                raise MemoryError
            for i in range(m + 1):
                tb.nt[i] = 0
                tb.nh[i] = 0
            for a in range(c):
                tb.nt[t[a] + 1] += 1
                tb.nh[h[a] + 1] += 1
            for i in range(1, m + 1):
                tb.nt[i] += tb.nt[i - 1]
                tb.nh[i] += tb.nh[i - 1]
        # tail/head ranks: nt[p] counts strictly-smaller positions
        for a in range(c):
            tr[a] = tb.nt[t[a]]
            hr[a] = tb.nh[h[a]]
        ts = <int*> malloc(stride * stride * sizeof(int))
        tc = <int*> malloc(stride * stride * sizeof(int))
        if not (ts and tc):
            free(ts); free(tc)
            raise MemoryError
        memset(ts, 0, stride * stride * sizeof(int))
        memset(tc, 0, stride * stride * sizeof(int))
        for a in range(c):
            if ordered and not (t[a] < h[a]):
                continue
            ts[(tr[a] + 1) * stride + hr[a] + 1] += <int> s[a]
            tc[(tr[a] + 1) * stride + hr[a] + 1] += 1
        with nogil:
            _prefix2d(ts, stride)
            _prefix2d(tc, stride)
        if ordered:
            tb.tos = ts
            tb.toc = tc
        else:
            tb.ts = ts
            tb.tc = tc
        return 0
    finally:
        free(tr); free(hr)


cdef void _free_tables(Tables* tb) noexcept nogil:
    free(tb.ts); free(tb.tc); free(tb.tos); free(tb.toc)
    free(tb.nt); free(tb.nh)


cdef inline i64 _rect(int* tab, int stride, i64 rt0, i64 rt1, i64 rh0, i64 rh1) noexcept nogil:
    # count over tail rank in [rt0, rt1), head rank in [rh0, rh1)
    if rt1 <= rt0 or rh1 <= rh0:
        return 0
    return (tab[rt1 * stride + rh1] - tab[rt0 * stride + rh1]
            - tab[rt1 * stride + rh0] + tab[rt0 * stride + rh0])


cdef inline i64 _count_window(Tables* tb, int con, bint same_gap, bint want_t_first,
                              i64 tlo, i64 thi, i64 hlo, i64 hhi) noexcept nogil:
    # window bounds are exclusive position bounds (tlo, thi) x (hlo, hhi)
    cdef int stride = tb.c + 1
    cdef i64 rt0 = tb.nt[tlo + 1], rt1 = tb.nt[thi]
    cdef i64 rh0 = tb.nh[hlo + 1], rh1 = tb.nh[hhi]
    cdef i64 full, orde
    if not same_gap:
        if con == 0:
            return _rect(tb.ts, stride, rt0, rt1, rh0, rh1)
        elif con == 1:
            return (_rect(tb.tc, stride, rt0, rt1, rh0, rh1)
                    + _rect(tb.ts, stride, rt0, rt1, rh0, rh1)) >> 1
        else:
            return -((_rect(tb.tc, stride, rt0, rt1, rh0, rh1)
                      - _rect(tb.ts, stride, rt0, rt1, rh0, rh1)) >> 1)
    if con == 0:
        full = _rect(tb.ts, stride, rt0, rt1, rh0, rh1)
        orde = _rect(tb.tos, stride, rt0, rt1, rh0, rh1)
    elif con == 1:
        full = (_rect(tb.tc, stride, rt0, rt1, rh0, rh1)
                + _rect(tb.ts, stride, rt0, rt1, rh0, rh1)) >> 1
        orde = (_rect(tb.toc, stride, rt0, rt1, rh0, rh1)
                + _rect(tb.tos, stride, rt0, rt1, rh0, rh1)) >> 1
    else:
        full = -((_rect(tb.tc, stride, rt0, rt1, rh0, rh1)
                  - _rect(tb.ts, stride, rt0, rt1, rh0, rh1)) >> 1)
        orde = -((_rect(tb.toc, stride, rt0, rt1, rh0, rh1)
                  - _rect(tb.tos, stride, rt0, rt1, rh0, rh1)) >> 1)
    return orde if want_t_first else (full - orde)


def eval_terms(tails, heads, signs, terms):
    """Weighted matching counts for arrow-diagram terms; see pure twin."""
    cdef cnp.ndarray[i64, ndim=1] t_arr = np.ascontiguousarray(tails, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] h_arr = np.ascontiguousarray(heads, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] s_arr = np.ascontiguousarray(signs, dtype=np.int64)
    cdef i64[::1] t = t_arr
    cdef i64[::1] h = h_arr
    cdef i64[::1] s = s_arr
    cdef int c = t_arr.shape[0]
    out = []

    cdef Tables tb
    tb.ts = tb.tc = tb.tos = tb.toc = tb.nt = tb.nh = NULL
    tb.c = c

    cdef int order, j
    cdef int sa[8]
    cdef int sh[8]
    cdef int con[4]
    cdef bint want_tables
    cdef int n_order2 = sum(1 for tm in terms if len(tm[2]) == 2)
    try:
        for term in terms:
            slot_arrow, slot_is_head, sign_con = term
            order = len(sign_con)
            for j in range(2 * order):
                sa[j] = slot_arrow[j]
                sh[j] = slot_is_head[j]
            for j in range(order):
                con[j] = sign_con[j]
            if order == 1:
                out.append(_eval1(t, h, s, c, sh, con))
                continue
            if order not in (2, 3):
                raise ValueError("compiled kernel supports pattern order <= 3")
            # tables pay off for order 3 always; for order 2 only when several
            # terms share them on a biggish diagram, or they already exist
            want_tables = order == 3 or tb.ts != NULL or (
                n_order2 >= 3 and c > PAIR_LOOP_MAX)
            if order == 2 and not want_tables:
                out.append(_eval2_loop(t, h, s, c, sa, sh, con))
                continue
            counted = _pick_counted(sa, order)
            if _counted_same_gap(sa, order, counted) and tb.tos == NULL:
                _build_tables(&tb, t, h, s, c, True)
            if tb.ts == NULL:
                _build_tables(&tb, t, h, s, c, False)
            if order == 2:
                out.append(_eval2_tab(t, h, s, c, sa, sh, con, &tb, counted))
            else:
                out.append(_eval3_tab(t, h, s, c, sa, sh, con, &tb, counted))
    finally:
        _free_tables(&tb)
    return out


cdef int _pick_counted(int* sa, int order) noexcept:
    """Pattern arrow to count via tables: prefer one not confined to one gap."""
    cdef int e, best = -1
    for e in range(order):
        if not _counted_same_gap(sa, order, e):
            return e
        if best < 0:
            best = e
    return best


cdef bint _counted_same_gap(int* sa, int order, int e) noexcept:
    cdef int n = 2 * order
    cdef int mine0 = -1, mine1 = -1, j
    for j in range(n):
        if sa[j] == e:
            if mine0 < 0:
                mine0 = j
            else:
                mine1 = j
    return _nbr(sa, e, mine0, 0, n) == _nbr(sa, e, mine1, 0, n) and \
        _nbr(sa, e, mine0, 1, n) == _nbr(sa, e, mine1, 1, n)


cdef int _nbr(int* sa, int e, int slot, int above, int n) noexcept:
    cdef int j
    if above:
        for j in range(slot + 1, n):
            if sa[j] != e:
                return j
        return n
    for j in range(slot - 1, -1, -1):
        if sa[j] != e:
            return j
    return -1


cdef i64 _eval1(i64[::1] t, i64[::1] h, i64[::1] s, int c, int* sh, int* con) noexcept:
    cdef i64 total = 0
    cdef i64 p0, p1, w
    cdef int a
    for a in range(c):
        w = _weight(s[a], con[0])
        if w == 0:
            continue
        p0 = h[a] if sh[0] else t[a]
        p1 = h[a] if sh[1] else t[a]
        if p0 < p1:
            total += w
    return total


cdef i64 _eval2_loop(i64[::1] t, i64[::1] h, i64[::1] s, int c,
                     int* sa, int* sh, int* con) noexcept:
    cdef i64 total = 0
    cdef i64 wa, wb, prev, cur
    cdef int ai, bi, j, ok, arr
    with nogil:
        for ai in range(c):
            wa = _weight(s[ai], con[0])
            if wa == 0:
                continue
            for bi in range(c):
                if bi == ai:
                    continue
                wb = _weight(s[bi], con[1])
                if wb == 0:
                    continue
                ok = 1
                prev = -1
                for j in range(4):
                    arr = ai if sa[j] == 0 else bi
                    cur = h[arr] if sh[j] else t[arr]
                    if cur <= prev:
                        ok = 0
                        break
                    prev = cur
                if ok:
                    total += wa * wb
    return total


cdef void _counted_geometry(int* sa, int* sh, int order, int counted,
                            int* enum_slot, int* enum_arrow, int* enum_head, int* n_enum,
                            int* tail_lo_k, int* tail_hi_k, int* head_lo_k, int* head_hi_k,
                            bint* same_gap, bint* want_t_first) noexcept:
    """Static per-term layout: enumerated slots and the counted arrow's windows."""
    cdef int n = 2 * order
    cdef int j, k
    cdef int mine0 = -1, mine1 = -1
    k = 0
    for j in range(n):
        if sa[j] == counted:
            if mine0 < 0:
                mine0 = j
            else:
                mine1 = j
        else:
            enum_slot[k] = j
            enum_arrow[k] = sa[j] if sa[j] < counted else sa[j] - 1
            enum_head[k] = sh[j]
            k += 1
    n_enum[0] = k
    cdef int tail_slot, head_slot
    if sh[mine0]:
        head_slot = mine0
        tail_slot = mine1
    else:
        tail_slot = mine0
        head_slot = mine1
    want_t_first[0] = tail_slot < head_slot
    tail_lo_k[0] = _bound_index(enum_slot, k, tail_slot, 0)
    tail_hi_k[0] = _bound_index(enum_slot, k, tail_slot, 1)
    head_lo_k[0] = _bound_index(enum_slot, k, head_slot, 0)
    head_hi_k[0] = _bound_index(enum_slot, k, head_slot, 1)
    same_gap[0] = tail_lo_k[0] == head_lo_k[0] and tail_hi_k[0] == head_hi_k[0]


cdef inline int _bound_index(int* enum_slot, int k, int slot, int above) noexcept:
    cdef int j
    if above:
        for j in range(k):
            if enum_slot[j] > slot:
                return j
        return 1000
    for j in range(k - 1, -1, -1):
        if enum_slot[j] < slot:
            return j
    return -1


cdef i64 _eval2_tab(i64[::1] t, i64[::1] h, i64[::1] s, int c,
                    int* sa, int* sh, int* con, Tables* tb, int counted) noexcept:
    cdef int m = 2 * c
    cdef int enum_slot[2]
    cdef int enum_arrow[2]
    cdef int enum_head[2]
    cdef int n_enum
    cdef int tlo_k, thi_k, hlo_k, hhi_k
    cdef bint same_gap, want_t_first
    _counted_geometry(sa, sh, 2, counted, enum_slot, enum_arrow, enum_head, &n_enum,
                      &tlo_k, &thi_k, &hlo_k, &hhi_k, &same_gap, &want_t_first)
    cdef int con_e = con[1 - counted]
    cdef int con_c = con[counted]
    cdef i64 total = 0
    cdef i64 wa, p0, p1, tlo, thi, hlo, hhi
    cdef i64 p[2]
    cdef int ai, j
    with nogil:
        for ai in range(c):
            wa = _weight(s[ai], con_e)
            if wa == 0:
                continue
            p0 = h[ai] if enum_head[0] else t[ai]
            p1 = h[ai] if enum_head[1] else t[ai]
            if p0 >= p1:
                continue
            p[0] = p0
            p[1] = p1
            tlo = -1 if tlo_k < 0 else p[tlo_k]
            thi = m if thi_k >= 1000 else p[thi_k]
            hlo = -1 if hlo_k < 0 else p[hlo_k]
            hhi = m if hhi_k >= 1000 else p[hhi_k]
            total += wa * _count_window(tb, con_c, same_gap, want_t_first,
                                        tlo, thi, hlo, hhi)
    return total


cdef i64 _eval3_tab(i64[::1] t, i64[::1] h, i64[::1] s, int c,
                    int* sa, int* sh, int* con, Tables* tb, int counted) noexcept:
    cdef int m = 2 * c
    cdef int enum_slot[4]
    cdef int enum_arrow[4]
    cdef int enum_head[4]
    cdef int n_enum
    cdef int tlo_k, thi_k, hlo_k, hhi_k
    cdef bint same_gap, want_t_first
    _counted_geometry(sa, sh, 3, counted, enum_slot, enum_arrow, enum_head, &n_enum,
                      &tlo_k, &thi_k, &hlo_k, &hhi_k, &same_gap, &want_t_first)
    # enumerated arrows relabeled 0/1 by _counted_geometry
    cdef int con_a = -9, con_b = -9, e
    for e in range(3):
        if e == counted:
            continue
        if con_a == -9:
            con_a = con[e]
        else:
            con_b = con[e]
    cdef int con_c = con[counted]
    cdef i64 total = 0
    cdef i64 wa, wb, prev, cur, tlo, thi, hlo, hhi
    cdef i64 p[4]
    cdef int ai, bi, j, ok, arr
    with nogil:
        for ai in range(c):
            wa = _weight(s[ai], con_a)
            if wa == 0:
                continue
            for bi in range(c):
                if bi == ai:
                    continue
                wb = _weight(s[bi], con_b)
                if wb == 0:
                    continue
                ok = 1
                prev = -1
                for j in range(4):
                    arr = ai if enum_arrow[j] == 0 else bi
                    cur = h[arr] if enum_head[j] else t[arr]
                    if cur <= prev:
                        ok = 0
                        break
                    prev = cur
                    p[j] = cur
                if not ok:
                    continue
                tlo = -1 if tlo_k < 0 else p[tlo_k]
                thi = m if thi_k >= 1000 else p[thi_k]
                hlo = -1 if hlo_k < 0 else p[hlo_k]
                hhi = m if hhi_k >= 1000 else p[hhi_k]
                total += wa * wb * _count_window(tb, con_c, same_gap, want_t_first,
                                                 tlo, thi, hlo, hhi)
    return total


def bracket_tally(over_pos, under_pos, signs):
    """Kauffman-bracket state census; see pure twin for conventions."""
    cdef cnp.ndarray[i64, ndim=1] o = np.ascontiguousarray(over_pos, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] u = np.ascontiguousarray(under_pos, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] sg = np.ascontiguousarray(signs, dtype=np.int64)
    cdef int c = o.shape[0]
    cdef int m = 2 * c
    if c == 0:
        return np.zeros((1, 2), dtype=np.int64)
    if c > 24:
        raise ValueError("state sum over 2^%d states refused" % c)
    cdef cnp.ndarray[i64, ndim=2] n_tab = np.zeros((2 * c + 1, c + 2), dtype=np.int64)
    cdef i64[:, ::1] N = n_tab
    cdef int* parent = <int*> malloc(m * sizeof(int))
    cdef int* oi = <int*> malloc(c * sizeof(int))
    cdef int* oo = <int*> malloc(c * sizeof(int))
    cdef int* ui = <int*> malloc(c * sizeof(int))
    cdef int* uo = <int*> malloc(c * sizeof(int))
    cdef int* pos = <int*> malloc(c * sizeof(int))
    if not (parent and oi and oo and ui and uo and pos):
        free(parent); free(oi); free(oo); free(ui); free(uo); free(pos)
        raise MemoryError
    cdef unsigned long long state, nstates = 1ULL << c
    cdef int cid, a_minus_b, loops, x, use_a
    cdef int x1, y1, x2, y2
    try:
        for cid in range(c):
            oi[cid] = (o[cid] - 1 + m) % m
            oo[cid] = o[cid]
            ui[cid] = (u[cid] - 1 + m) % m
            uo[cid] = u[cid]
            pos[cid] = 1 if sg[cid] > 0 else 0
        with nogil:
            for state in range(nstates):
                for x in range(m):
                    parent[x] = x
                a_minus_b = 0
                for cid in range(c):
                    use_a = 0 if (state >> cid) & 1 else 1
                    a_minus_b += 1 if use_a else -1
                    if use_a == pos[cid]:
                        x1 = ui[cid]; y1 = oo[cid]
                        x2 = oi[cid]; y2 = uo[cid]
                    else:
                        x1 = ui[cid]; y1 = oi[cid]
                        x2 = uo[cid]; y2 = oo[cid]
                    _union(parent, x1, y1)
                    _union(parent, x2, y2)
                loops = 0
                for x in range(m):
                    if _find(parent, x) == x:
                        loops += 1
                N[a_minus_b + c, loops] += 1
    finally:
        free(parent); free(oi); free(oo); free(ui); free(uo); free(pos)
    return n_tab


cdef inline int _find(int* parent, int x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


cdef inline void _union(int* parent, int x, int y) noexcept nogil:
    cdef int rx = _find(parent, x)
    cdef int ry = _find(parent, y)
    if rx != ry:
        parent[rx] = ry


def bareiss_det_int64(matrix):
    """Fraction-free determinant; caller guarantees intermediates fit int64."""
    cdef cnp.ndarray[i64, ndim=2] M = np.array(matrix, dtype=np.int64, order="C")
    cdef int n = M.shape[0]
    if n == 0:
        return 1
    cdef i64[:, ::1] A = M
    cdef int sign = 1, k, i, j, piv
    cdef i64 prev = 1, pk, mik
    for k in range(n - 1):
        if A[k, k] == 0:
            piv = -1
            for i in range(k + 1, n):
                if A[i, k] != 0:
                    piv = i
                    break
            if piv < 0:
                return 0
            for j in range(n):
                pk = A[k, j]
                A[k, j] = A[piv, j]
                A[piv, j] = pk
            sign = -sign
        pk = A[k, k]
        for i in range(k + 1, n):
            mik = A[i, k]
            for j in range(k + 1, n):
                A[i, j] = (A[i, j] * pk - mik * A[k, j]) // prev
        prev = pk
    return int(sign * A[n - 1, n - 1])


def det_mod(matrix, p):
    """Determinant modulo a prime p (p < 2^31) via Gaussian elimination."""
    cdef cnp.ndarray[i64, ndim=2] M = np.array(matrix, dtype=np.int64, order="C")
    cdef i64 pp = p
    cdef int n = M.shape[0]
    cdef i64[:, ::1] A = M
    cdef int k, i, j, piv
    cdef i64 det = 1, pk, inv, f
    with nogil:
        for i in range(n):
            for j in range(n):
                A[i, j] = A[i, j] % pp
                if A[i, j] < 0:
                    A[i, j] += pp
        for k in range(n):
            piv = -1
            for i in range(k, n):
                if A[i, k] != 0:
                    piv = i
                    break
            if piv < 0:
                det = 0
                break
            if piv != k:
                for j in range(k, n):
                    pk = A[k, j]
                    A[k, j] = A[piv, j]
                    A[piv, j] = pk
                det = pp - det if det != 0 else 0
            pk = A[k, k]
            det = (det * pk) % pp
            inv = _inv_mod(pk, pp)
            for i in range(k + 1, n):
                f = (A[i, k] * inv) % pp
                if f:
                    for j in range(k, n):
                        A[i, j] = (A[i, j] - f * A[k, j]) % pp
                        if A[i, j] < 0:
                            A[i, j] += pp
    return int(det % pp)


cdef inline i64 _inv_mod(i64 a, i64 p) noexcept nogil:
    cdef i64 result = 1, base = a % p, e = p - 2
    while e:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result
