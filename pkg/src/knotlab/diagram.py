"""Diagram representations and the conversions between them.

The universal internal representation is :class:`DiagramCode`, a signed,
oriented, multi-component Gauss code.  Components are stored as parallel
numpy arrays (crossing id, role, sign per visit) so that the invariant
kernels can consume them without per-visit Python objects; the tuple-level
view is available through :meth:`DiagramCode.visits`.

Conventions (frozen by the calibration tests):

* crossing sign: +1 when the ordered frame (over direction, under direction)
  is positively oriented;
* grid diagrams: vertical segments always over; path alternates
  (rho_i, sigma_i) -> (rho_i, sigma_{i+1}) -> (rho_{i+1}, sigma_{i+1});
* petal diagrams embed into the (2n+1)-grid with rho(k) = n*k mod (2n+1)
  and sigma = the height permutation;
* braid letter +i means the strand in position i crosses over position i+1
  and contributes a +1 crossing.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence

import numpy as np

OVER = 1
UNDER = 0

__all__ = [
    "OVER",
    "UNDER",
    "Closure",
    "CrossingVisit",
    "DiagramCode",
    "GridDiagram",
    "PetalPermutation",
    "BraidWord",
    "TabulatedKnot",
    "ValidationReport",
    "validate_diagram",
    "grid_to_diagram",
    "petal_to_grid",
    "braid_closure_to_diagram",
    "flat_torus_diagram",
    "petal_to_braid",
    "mirror",
    "parse_dt",
    "dt_code",
    "load_dt_fixtures",
]


class Closure(str, Enum):
    """How the ends of a braid are joined."""

    TRACE = "trace"
    PLAT = "plat"


@dataclass(frozen=True)
class CrossingVisit:
    """One passage through a crossing: id, Over/Under role, crossing sign."""

    crossing: int
    role: int  # OVER or UNDER
    sign: int  # +1 or -1

    def __post_init__(self):
        if self.role not in (OVER, UNDER):
            raise ValueError(f"bad role {self.role}")
        if self.sign not in (1, -1):
            raise ValueError(f"bad sign {self.sign}")


class DiagramCode:
    """Signed, oriented, multi-component Gauss code.

    Each component is a cyclic sequence of crossing visits.  Every crossing id
    in [0, crossing_count) appears exactly twice, once Over and once Under,
    with equal signs.
    """

    __slots__ = ("_cids", "_roles", "_signs", "crossing_count")

    def __init__(self, components: Iterable[Sequence[CrossingVisit | tuple]]):
        cids, roles, signs = [], [], []
        for comp in components:
            cc, rr, ss = [], [], []
            for v in comp:
                if isinstance(v, CrossingVisit):
                    cc.append(v.crossing); rr.append(v.role); ss.append(v.sign)
                else:
                    cc.append(v[0]); rr.append(v[1]); ss.append(v[2])
            cids.append(np.asarray(cc, dtype=np.int64))
            roles.append(np.asarray(rr, dtype=np.int8))
            signs.append(np.asarray(ss, dtype=np.int8))
        if not cids:
            raise ValueError("diagram needs at least one component")
        self._cids = tuple(cids)
        self._roles = tuple(roles)
        self._signs = tuple(signs)
        n = 0
        for arr in cids:
            if arr.size:
                n = max(n, int(arr.max()) + 1)
        self.crossing_count = n

    @classmethod
    def _from_arrays(cls, cids, roles, signs) -> "DiagramCode":
        self = object.__new__(cls)
        self._cids = tuple(np.asarray(a, dtype=np.int64) for a in cids)
        self._roles = tuple(np.asarray(a, dtype=np.int8) for a in roles)
        self._signs = tuple(np.asarray(a, dtype=np.int8) for a in signs)
        n = 0
        for arr in self._cids:
            if arr.size:
                n = max(n, int(arr.max()) + 1)
        self.crossing_count = n
        return self

    # -- views ---------------------------------------------------------------

    @property
    def component_count(self) -> int:
        return len(self._cids)

    def component_arrays(self, i: int):
        """(crossing ids, roles, signs) arrays of component i."""
        return self._cids[i], self._roles[i], self._signs[i]

    def visits(self, i: int) -> Iterator[CrossingVisit]:
        for c, r, s in zip(self._cids[i], self._roles[i], self._signs[i]):
            yield CrossingVisit(int(c), int(r), int(s))

    @property
    def components(self) -> tuple[tuple[CrossingVisit, ...], ...]:
        return tuple(tuple(self.visits(i)) for i in range(self.component_count))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiagramCode):
            return NotImplemented
        return (self.component_count == other.component_count
                and all(np.array_equal(a, b) for a, b in zip(self._cids, other._cids))
                and all(np.array_equal(a, b) for a, b in zip(self._roles, other._roles))
                and all(np.array_equal(a, b) for a, b in zip(self._signs, other._signs)))

    def __repr__(self) -> str:
        return (f"DiagramCode(components={self.component_count}, "
                f"crossings={self.crossing_count})")

    # -- serialization (JSON: components as arrays of [id, "O"|"U", sign]) ----

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), separators=(",", ":"))

    def to_obj(self) -> list:
        return [[[int(c), "O" if r == OVER else "U", int(s)]
                 for c, r, s in zip(*self.component_arrays(i))]
                for i in range(self.component_count)]

    @classmethod
    def from_obj(cls, obj) -> "DiagramCode":
        comps = []
        for comp in obj:
            comps.append([(int(c), OVER if r == "O" else UNDER, int(s))
                          for c, r, s in comp])
        return cls(comps)

    @classmethod
    def from_json(cls, text: str) -> "DiagramCode":
        return cls.from_obj(json.loads(text))

    # -- single-component arrow view (used by the invariant kernels) ----------

    def arrow_arrays(self):
        """(tails, heads, signs) with tail = under-visit position, head = over.

        Only defined for single-component diagrams (based circle).
        """
        if self.component_count != 1:
            raise ValueError("arrow view requires a single-component diagram")
        cids, roles, signs = self._cids[0], self._roles[0], self._signs[0]
        c = self.crossing_count
        tails = np.zeros(c, dtype=np.int64)
        heads = np.zeros(c, dtype=np.int64)
        sg = np.zeros(c, dtype=np.int64)
        pos = np.arange(cids.size, dtype=np.int64)
        under = roles == UNDER
        tails[cids[under]] = pos[under]
        heads[cids[~under]] = pos[~under]
        sg[cids] = signs
        return tails, heads, sg


@dataclass(frozen=True)
class GridDiagram:
    """Grid diagram encoded by a pair of permutations of {0..n-1}."""

    rho: tuple[int, ...]
    sigma: tuple[int, ...]

    def __post_init__(self):
        n = len(self.rho)
        if n < 1 or len(self.sigma) != n:
            raise ValueError("rho and sigma must have equal positive length")
        if sorted(self.rho) != list(range(n)) or sorted(self.sigma) != list(range(n)):
            raise ValueError("rho and sigma must be permutations of 0..n-1")

    @property
    def size(self) -> int:
        return len(self.rho)


@dataclass(frozen=True)
class PetalPermutation:
    """Petal diagram of a knot: odd petal count, strand-height permutation."""

    heights: tuple[int, ...]

    def __post_init__(self):
        n = len(self.heights)
        if n % 2 == 0:
            raise ValueError("petal count must be odd")
        if sorted(self.heights) != list(range(n)):
            raise ValueError("heights must be a permutation of 0..petals-1")

    @property
    def petals(self) -> int:
        return len(self.heights)


@dataclass(frozen=True)
class BraidWord:
    """Braid word on `strands` strands; letter i means sigma_i, -i its inverse."""

    strands: int
    letters: tuple[int, ...]
    closure: Closure = Closure.TRACE

    def __post_init__(self):
        if self.strands < 2:
            raise ValueError("braid needs at least 2 strands")
        for let in self.letters:
            if let == 0 or abs(let) >= self.strands:
                raise ValueError(f"letter {let} out of range for {self.strands} strands")
        if self.closure == Closure.PLAT and self.strands % 2:
            raise ValueError("plat closure needs an even number of strands")


@dataclass(frozen=True)
class TabulatedKnot:
    """A knot-table fixture: name, DT code, optional expected invariants."""

    name: str
    dt_code: tuple[int, ...]
    expected: dict = field(default_factory=dict)


# -----------------------------------------------------------------------------


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str]

    def __bool__(self) -> bool:
        return self.ok


def validate_diagram(d: DiagramCode) -> ValidationReport:
    """Check the DiagramCode invariants; returns a report, never raises."""
    seen: dict[int, list[tuple[int, int]]] = {}
    violations = []
    for i in range(d.component_count):
        cids, roles, signs = d.component_arrays(i)
        for c, r, s in zip(cids.tolist(), roles.tolist(), signs.tolist()):
            seen.setdefault(c, []).append((r, s))
    for c in range(d.crossing_count):
        vs = seen.get(c, [])
        if len(vs) != 2:
            violations.append(f"crossing {c}: missing visit ({len(vs)} found)")
            continue
        (r1, s1), (r2, s2) = vs
        if r1 == r2:
            violations.append(f"crossing {c}: role pair broken")
        if s1 != s2:
            violations.append(f"crossing {c}: sign mismatch")
    for c in seen:
        if not 0 <= c < d.crossing_count:
            violations.append(f"crossing id {c} out of range")
    return ValidationReport(not violations, violations)


def grid_to_diagram(g: GridDiagram) -> DiagramCode:
    """Convert a grid diagram to its (single component) Gauss code.

    A crossing occurs where a vertical segment's x lies strictly between a
    horizontal segment's x-endpoints and vice versa; verticals are always
    over, and the sign is the orientation of (vertical dir, horizontal dir).
    """
    rho = np.asarray(g.rho, dtype=np.int64)
    sigma = np.asarray(g.sigma, dtype=np.int64)
    n = g.size
    sig_next = np.roll(sigma, -1)
    rho_next = np.roll(rho, -1)
    # vertical i: x = rho[i], y from sigma[i] to sig_next[i]
    # horizontal j: y = sig_next[j], x from rho[j] to rho_next[j]
    vx = rho
    vy_lo = np.minimum(sigma, sig_next)
    vy_hi = np.maximum(sigma, sig_next)
    vdir = np.where(sig_next > sigma, 1, -1)
    hy = sig_next
    hx_lo = np.minimum(rho, rho_next)
    hx_hi = np.maximum(rho, rho_next)
    hdir = np.where(rho_next > rho, 1, -1)

    xin = (hx_lo[None, :] < vx[:, None]) & (vx[:, None] < hx_hi[None, :])
    yin = (vy_lo[:, None] < hy[None, :]) & (hy[None, :] < vy_hi[:, None])
    cross = xin & yin
    vi, hj = np.nonzero(cross)
    signs = (-vdir[vi] * hdir[hj]).astype(np.int8)
    cid = np.arange(vi.size, dtype=np.int64)

    # order visits along the path V_0 H_0 V_1 H_1 ...: each crossing appears
    # once on its vertical (slot 2i, over) and once on its horizontal
    # (slot 2j+1, under), positioned by the direction-adjusted coordinate
    slots = np.concatenate([2 * vi, 2 * hj + 1])
    coord = np.concatenate([vdir[vi] * hy[hj], hdir[hj] * vx[vi]])
    order = np.lexsort((coord, slots))
    both_cids = np.concatenate([cid, cid])[order]
    both_roles = np.concatenate([
        np.full(vi.size, OVER, dtype=np.int8),
        np.full(vi.size, UNDER, dtype=np.int8),
    ])[order]
    both_signs = np.concatenate([signs, signs])[order]
    return DiagramCode._from_arrays([both_cids], [both_roles], [both_signs])


def petal_to_grid(p: PetalPermutation) -> GridDiagram:
    """Embed a petal diagram in the (2n+1)-grid: rho(k) = n*k mod (2n+1)."""
    npet = p.petals
    n = npet // 2
    rho = tuple((n * k) % npet for k in range(npet))
    return GridDiagram(rho=rho, sigma=tuple(p.heights))


def braid_closure_to_diagram(b: BraidWord) -> DiagramCode:
    """Close a braid word and return the Gauss code of the resulting link."""
    m = b.strands
    strand_at = list(range(m))
    visits: list[list[tuple[int, int, int]]] = [[] for _ in range(m)]
    for cid, let in enumerate(b.letters):
        i = abs(let) - 1
        a, bb = strand_at[i], strand_at[i + 1]
        if let > 0:
            visits[a].append((cid, OVER, 1))
            visits[bb].append((cid, UNDER, 1))
        else:
            visits[a].append((cid, UNDER, -1))
            visits[bb].append((cid, OVER, -1))
        strand_at[i], strand_at[i + 1] = bb, a
    end_pos = {strand_at[p]: p for p in range(m)}

    if b.closure == Closure.TRACE:
        comps = []
        seen: set[int] = set()
        for s0 in range(m):
            if s0 in seen:
                continue
            comp: list[tuple[int, int, int]] = []
            s = s0
            while True:
                seen.add(s)
                comp.extend(visits[s])
                s = end_pos[s]
                if s == s0:
                    break
            comps.append(comp)
        return DiagramCode(comps)

    # plat closure: caps pair positions (0,1), (2,3), ... on both sides;
    # strands traversed against the braid direction flip their crossings' signs
    paths = []
    visited: set[int] = set()
    for s0 in range(m):
        if s0 in visited:
            continue
        path: list[tuple[int, int]] = []
        s, d = s0, +1
        while True:
            path.append((s, d))
            visited.add(s)
            if d == +1:
                p2 = end_pos[s] ^ 1
                s, d = strand_at[p2], -1
            else:
                s, d = s ^ 1, +1
            if (s, d) == path[0]:
                break
        paths.append(path)
    sdir = {s: d for path in paths for (s, d) in path}
    meet: dict[int, list[int]] = {}
    for s in range(m):
        for (cid, _, _) in visits[s]:
            meet.setdefault(cid, []).append(s)
    comps = []
    for path in paths:
        comp = []
        for (s, d) in path:
            vs = visits[s] if d == +1 else list(reversed(visits[s]))
            for (cid, role, sg) in vs:
                a, bb = meet[cid]
                comp.append((cid, role, sg * sdir[a] * sdir[bb]))
        comps.append(comp)
    return DiagramCode(comps)


def flat_torus_diagram(p: int, q: int, signs: Sequence[int]) -> DiagramCode:
    """T(p, q): the closed braid (sigma_1 ... sigma_{p-1})^q with given letter signs."""
    if p < 2 or q < 1:
        raise ValueError("flat torus needs p >= 2, q >= 1")
    base = [(i % (p - 1)) + 1 for i in range((p - 1) * q)]
    if len(signs) != len(base):
        raise ValueError(f"need {(p - 1) * q} signs, got {len(signs)}")
    letters = tuple(g * (1 if s > 0 else -1) for g, s in zip(base, signs))
    return braid_closure_to_diagram(BraidWord(strands=p, letters=letters))


def mirror(d: DiagramCode) -> DiagramCode:
    """Mirror image: swap Over/Under at every crossing and flip every sign."""
    cids = [a.copy() for a in d._cids]
    roles = [(1 - a).astype(np.int8) for a in d._roles]
    signs = [(-a).astype(np.int8) for a in d._signs]
    return DiagramCode._from_arrays(cids, roles, signs)


# -- petal -> braid (annulus sweep of the star diagram) -----------------------


def petal_to_braid(p: PetalPermutation) -> BraidWord:
    """Star-braid form of a petal diagram.

    Straightening the petal loops gives the star polygon whose chords, swept
    around the annulus, read off a braid on n strands (petals = 2n+1) whose
    trace closure is the same knot.  Positive letter when the radially inner
    strand passes over the outer one.
    """
    heights = p.heights
    npet = p.petals
    n = npet // 2
    if n < 2:
        # 1 or 3 petals always close to the unknot; emit a one-kink 2-braid
        # (an empty word would trace-close to a 2-component unlink instead)
        return BraidWord(strands=2, letters=(1,))
    ninv = pow(n, -1, npet)
    order = sorted(range(-n + 1, 1), key=lambda a: abs(0.25 - a - n / 2))
    letters: list[int] = []

    def height_of(lift: int) -> int:
        return heights[((lift % npet) * ninv) % npet]

    for u in range(1, 2 * npet + 1):
        th = u / 2
        ssum = u - n  # crossing pairs satisfy c + c' = 2*theta - n
        pr = []
        for ri, ci in enumerate(order):
            cj = ssum - ci
            if ci < cj and (th - n < ci < th) and (th - n < cj < th):
                rj = order.index(cj)
                if abs(ri - rj) != 1:
                    raise AssertionError("sweep invariant broken: pair not adjacent")
                pr.append(min(ri, rj))
        for r in sorted(pr):
            e = 1 if height_of(order[r]) > height_of(order[r + 1]) else -1
            letters.append((r + 1) * e)
            order[r], order[r + 1] = order[r + 1], order[r]
        if u % 2 == 0:
            t = u // 2
            if order[-1] != t - n:
                raise AssertionError("sweep invariant broken: tip not outermost")
            order[-1] = t
    return BraidWord(strands=n, letters=tuple(letters))


# -- DT codes ------------------------------------------------------------------


class DTParseError(ValueError):
    pass


def parse_dt(code: Sequence[int] | str) -> DiagramCode:
    """Reconstruct a signed Gauss code realizing a knot DT code.

    Entry i pairs odd position 2i+1 with even position |code[i]|; a positive
    entry means the odd visit passes under.  Crossing signs are recovered by
    searching sign assignments for one whose rotation system is planar
    (V - E + F = 2); non-realizable codes raise :class:`DTParseError`.
    """
    if isinstance(code, str):
        entries = [int(x) for x in code.split()]
    else:
        entries = [int(x) for x in code]
    c = len(entries)
    if c == 0:
        return DiagramCode([[]])
    if c > 16:
        raise DTParseError("DT parsing supports at most 16 crossings")
    need = set(range(2, 2 * c + 1, 2))
    got = {abs(e) for e in entries}
    if got != need:
        bad = sorted(got ^ need)
        raise DTParseError(f"malformed DT code near entry {bad[0]}")
    mate = {}
    for i, e in enumerate(entries):
        o = 2 * i + 1
        mate[o] = abs(e)
        mate[abs(e)] = o
    cid_of: dict[int, int] = {}
    visits = []
    for pos in range(1, 2 * c + 1):
        key = min(pos, mate[pos])
        if key not in cid_of:
            cid_of[key] = len(cid_of)
        cid = cid_of[key]
        if pos % 2 == 1:
            entry = entries[(pos - 1) // 2]
            role = UNDER if entry > 0 else OVER
        else:
            entry = entries[(mate[pos] - 1) // 2]
            role = OVER if entry > 0 else UNDER
        visits.append((cid, role))

    m = 2 * c
    over_pos = {}
    under_pos = {}
    for p0, (cid, role) in enumerate(visits):
        (over_pos if role == OVER else under_pos)[cid] = p0

    def planar(signs: list[int]) -> bool:
        rot_next = {}
        for cid in range(c):
            o, u = over_pos[cid], under_pos[cid]
            out_over, in_over = 2 * o, 2 * ((o - 1) % m) + 1
            out_under, in_under = 2 * u, 2 * ((u - 1) % m) + 1
            if signs[cid] > 0:
                cyc = (out_over, out_under, in_over, in_under)
            else:
                cyc = (out_over, in_under, in_over, out_under)
            for i in range(4):
                rot_next[cyc[i]] = cyc[(i + 1) % 4]
        seen: set[int] = set()
        faces = 0
        for h0 in range(2 * m):
            if h0 in seen:
                continue
            faces += 1
            h = h0
            while h not in seen:
                seen.add(h)
                h = rot_next[h ^ 1]
        return faces == c + 2

    for bits in range(1 << c):
        signs = [1 if (bits >> i) & 1 else -1 for i in range(c)]
        if planar(signs):
            return DiagramCode([[(cid, role, signs[cid]) for (cid, role) in visits]])
    raise DTParseError("DT code is not realizable as a planar knot diagram")


def dt_code(d: DiagramCode) -> tuple[int, ...]:
    """DT code of a single-component diagram (inverse of :func:`parse_dt`)."""
    if d.component_count != 1:
        raise ValueError("DT codes describe knots only")
    cids, roles, _ = d.component_arrays(0)
    m = cids.size
    if m % 2:
        raise ValueError("odd visit count")
    pospair: dict[int, list[int]] = {}
    for p, cid in enumerate(cids.tolist()):
        pospair.setdefault(cid, []).append(p + 1)
    entries = []
    for i in range(m // 2):
        o = 2 * i + 1
        cid = int(cids[o - 1])
        a, b = pospair[cid]
        e = b if a == o else a
        odd_role = int(roles[o - 1])
        entries.append(e if odd_role == UNDER else -e)
    return tuple(entries)


_DT_LINE = re.compile(r"^\s*([^;#]+);(.*)$")


def load_dt_fixtures(path) -> list[TabulatedKnot]:
    """Parse the DT fixture format: ``name; dt: 4 6 2; det: 3; c2: 1``."""
    out = []
    with open(path) as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            mobj = _DT_LINE.match(line)
            if not mobj:
                raise ValueError(f"{path}:{ln}: bad fixture line")
            name = mobj.group(1).strip()
            dt: tuple[int, ...] | None = None
            expected = {}
            for fieldtxt in mobj.group(2).split(";"):
                fieldtxt = fieldtxt.strip()
                if not fieldtxt:
                    continue
                key, _, val = fieldtxt.partition(":")
                key = key.strip()
                if key == "dt":
                    dt = tuple(int(x) for x in val.split())
                else:
                    expected[key] = int(val)
            if dt is None:
                raise ValueError(f"{path}:{ln}: missing dt field")
            out.append(TabulatedKnot(name=name, dt_code=dt, expected=expected))
    return out
