"""Seeded random samplers for every model family, plus the ModelSpec schema.

Determinism contract: every sampler is a pure function of its arguments and
the numpy Generator passed in.  The experiment harness derives one child
stream per sample index via :func:`substream` (a counter-based Philox
generator keyed by (master seed, index)), so results never depend on shard
count or scheduling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .diagram import (
    OVER,
    UNDER,
    BraidWord,
    Closure,
    DiagramCode,
    GridDiagram,
    PetalPermutation,
    braid_closure_to_diagram,
    grid_to_diagram,
    petal_to_grid,
)
from .geometry import Polygon3D, project_generic

__all__ = [
    "FAMILIES",
    "ModelSpec",
    "make_rng",
    "substream",
    "sample_petaluma",
    "sample_petaluma_link",
    "petal_link_diagram",
    "sample_grid",
    "sample_griddle",
    "sample_jump",
    "sample_gaussian_polygon",
    "sample_fourier_loop",
    "fourier_cutoff",
    "sample_braid_walk",
    "sample_crisscross",
    "crisscross_word",
    "crisscross_sample_word",
    "sample_object",
    "object_to_diagram",
    "sample_diagram",
]

MASK64 = (1 << 64) - 1

FAMILIES = (
    "PetalumaKnot",
    "PetalumaLink",
    "GridKnot",
    "Griddle",
    "JumpPolygon",
    "GaussianPolygon",
    "FourierLoop",
    "BraidWalk",
    "FlatTorus",
    "Star",
    "Billiard",
)

JUMP_DOMAINS = ("cube", "ball", "sphere", "gaussian")
FOURIER_SCHEMES = ("sharp-cutoff", "exp", "gauss", "power")


def make_rng(seed) -> np.random.Generator:
    """Accept an int seed or a ready Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed) & MASK64)))


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent child stream for one sample index of a master seed."""
    ss = np.random.SeedSequence(entropy=int(seed) & MASK64, spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class ModelSpec:
    """Declarative description of one random-model instance.

    JSON schema (version 1): {"family": ..., "params": {...}, "options": {...}}.
    """

    family: str
    params: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    SCHEMA_VERSION = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}")
        self.validate()

    def validate(self) -> None:
        p, o = self.params, self.options
        fam = self.family
        if fam == "PetalumaKnot":
            petals = _need_int(p, "petals", 1)
            if petals % 2 == 0:
                raise ValueError("PetalumaKnot petal count must be odd")
        elif fam == "PetalumaLink":
            counts = p.get("petals")
            if not isinstance(counts, (list, tuple)) or len(counts) < 2:
                raise ValueError("PetalumaLink needs a list of >= 2 petal counts")
            for x in counts:
                if int(x) < 2 or int(x) % 2:
                    raise ValueError("PetalumaLink petal counts must be even and >= 2")
        elif fam in ("GridKnot", "Griddle"):
            _need_int(p, "n", 2)
        elif fam == "JumpPolygon":
            counts = p.get("counts", p.get("n"))
            if counts is None:
                raise ValueError("JumpPolygon needs 'n' or 'counts'")
            counts = [counts] if isinstance(counts, int) else list(counts)
            for x in counts:
                if int(x) < 3:
                    raise ValueError("JumpPolygon components need >= 3 vertices")
            dom = o.get("domain", "cube")
            if dom not in JUMP_DOMAINS:
                raise ValueError(f"unsupported jump domain {dom!r}")
        elif fam == "GaussianPolygon":
            _need_int(p, "n", 3)
        elif fam == "FourierLoop":
            n = _need_int(p, "n", 1)
            scheme = o.get("scheme", "sharp-cutoff")
            if scheme not in FOURIER_SCHEMES:
                raise ValueError(f"unsupported Fourier scheme {scheme!r}")
            if scheme == "power" and float(o.get("alpha", 0)) <= 0.55:
                raise ValueError("power scheme needs alpha > 0.55")
            points = int(p.get("points", 12 * n))
            if points < 12 * n:
                raise ValueError("FourierLoop needs points >= 12*n")
        elif fam == "BraidWalk":
            _need_int(p, "strands", 2)
            _need_int(p, "length", 1)
            closure = o.get("closure", "trace")
            Closure(closure)
            if closure == "plat" and p["strands"] % 2:
                raise ValueError("plat closure needs even strand count")
        elif fam == "FlatTorus":
            _need_int(p, "p", 2)
            _need_int(p, "q", 1)
        elif fam == "Star":
            _need_int(p, "n", 2)
        elif fam == "Billiard":
            a = _need_int(p, "a", 2)
            b = _need_int(p, "b", 2)
            if math.gcd(a, b) != 1:
                raise ValueError("Billiard ratio must be coprime")

    def to_json(self) -> str:
        return json.dumps({"family": self.family, "params": self.params,
                           "options": self.options, "version": self.SCHEMA_VERSION},
                          separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ModelSpec":
        obj = json.loads(text)
        return cls(family=obj["family"], params=obj.get("params", {}),
                   options=obj.get("options", {}))


def _need_int(params: dict, key: str, minimum: int) -> int:
    if key not in params:
        raise ValueError(f"missing parameter {key!r}")
    v = int(params[key])
    if v < minimum:
        raise ValueError(f"parameter {key} must be >= {minimum}")
    return v


# -- individual samplers -------------------------------------------------------


def sample_petaluma(petals: int, seed) -> PetalPermutation:
    """Uniform petal permutation (unbiased shuffle)."""
    if petals < 1 or petals % 2 == 0:
        raise ValueError("petal count must be odd and positive")
    rng = make_rng(seed)
    return PetalPermutation(heights=tuple(int(x) for x in rng.permutation(petals)))


def petal_link_diagram(counts: Sequence[int], heights: Sequence[int]) -> DiagramCode:
    """Petal-diagram link with the given per-component (even) petal counts.

    Component c's passes through the single multi-crossing take line angles
    in the angular block [c*pi/k, (c+1)*pi/k), with senses alternating along
    each component; heights (a permutation of all passes, component-major)
    resolve the vertical order.  This is the interleaving convention pinned
    by the exhaustive (2,2) check and by the logistic linking-number law.
    """
    counts = [int(x) for x in counts]
    k = len(counts)
    if k < 2:
        raise ValueError("petal links need at least 2 components")
    for x in counts:
        if x < 2 or x % 2:
            raise ValueError("per-component petal counts must be even and >= 2")
    total = sum(counts)
    heights = np.asarray(heights, dtype=np.int64)
    if sorted(heights.tolist()) != list(range(total)):
        raise ValueError("heights must be a permutation of all passes")

    lcm = math.lcm(*counts)
    tau = np.empty(total, dtype=np.int64)   # line angle in units of pi/(k*lcm)
    par = np.empty(total, dtype=np.int64)   # sense parity
    comp_of = np.empty(total, dtype=np.int64)
    j = 0
    for c, pc in enumerate(counts):
        step = lcm // pc
        for u in range(pc):
            tau[j] = c * lcm + u * step
            par[j] = u % 2
            comp_of[j] = c
            j += 1

    # direction of pass j is u*pi + tau (senses alternate); mod 2pi the parity
    # bit carries everything the sine/cosine below need
    phi = par * math.pi + tau * (math.pi / (k * lcm))
    eps = np.arange(1, total + 1, dtype=np.float64)
    delta = phi[:, None] - phi[None, :]
    sin_d = np.sin(delta)
    cos_d = np.cos(delta)
    with np.errstate(divide="ignore", invalid="ignore"):
        sparam = (eps[None, :] - eps[:, None] * cos_d) / sin_d

    sgn_base = np.sign(tau[None, :] - tau[:, None]).astype(np.int64)
    factor = 1 - 2 * ((par[:, None] + par[None, :]) % 2)
    h = heights
    i_over = h[:, None] > h[None, :]
    sgn_mat = (factor * np.where(i_over, sgn_base, -sgn_base)).astype(np.int8)

    pid = np.zeros((total, total), dtype=np.int64)
    iu, ju = np.triu_indices(total, k=1)
    pid[iu, ju] = np.arange(iu.size)
    pid[ju, iu] = pid[iu, ju]

    np.fill_diagonal(sparam, np.inf)
    order_all = np.argsort(sparam, axis=1, kind="stable")[:, : total - 1]
    cids_parts, roles_parts, signs_parts = [], [], []
    for c in range(k):
        rows = np.nonzero(comp_of == c)[0]
        orderp = order_all[rows]
        cids_parts.append(pid[rows[:, None], orderp].ravel())
        roles_parts.append(
            np.where(h[rows][:, None] > h[orderp], OVER, UNDER).astype(np.int8).ravel())
        signs_parts.append(sgn_mat[rows[:, None], orderp].ravel())
    return DiagramCode._from_arrays(cids_parts, roles_parts, signs_parts)


def sample_petaluma_link(petals_per_component: Sequence[int], seed) -> DiagramCode:
    """Uniform heights over all passes of a multi-component petal diagram."""
    counts = [int(x) for x in petals_per_component]
    if len(counts) < 2:
        raise ValueError("petal links need at least 2 components")
    rng = make_rng(seed)
    heights = rng.permutation(sum(counts))
    return petal_link_diagram(counts, heights)


def sample_grid(n: int, seed) -> GridDiagram:
    """Two independent uniform permutations."""
    if n < 2:
        raise ValueError("grid size must be >= 2")
    rng = make_rng(seed)
    return GridDiagram(rho=tuple(int(x) for x in rng.permutation(n)),
                       sigma=tuple(int(x) for x in rng.permutation(n)))


def _rerandomize_crossings(d: DiagramCode, coins: np.ndarray) -> DiagramCode:
    """Flip over/under (and hence sign) at every crossing whose coin is 1."""
    cids, roles, signs = d.component_arrays(0)
    flip = coins[cids].astype(np.int8)
    roles2 = (roles ^ flip).astype(np.int8)
    signs2 = (signs * (1 - 2 * flip)).astype(np.int8)
    return DiagramCode._from_arrays([cids.copy()], [roles2], [signs2])


def sample_griddle(n: int, seed) -> DiagramCode:
    """Random grid diagram with every crossing re-randomized by a fair coin."""
    rng = make_rng(seed)
    g = sample_grid(n, rng)
    d = grid_to_diagram(g)
    coins = rng.integers(0, 2, size=d.crossing_count, dtype=np.int64)
    return _rerandomize_crossings(d, coins)


def _jump_points(rng: np.random.Generator, n: int, domain: str) -> np.ndarray:
    if domain == "cube":
        return rng.random((n, 3))
    if domain == "gaussian":
        return rng.standard_normal((n, 3))
    if domain == "sphere":
        v = rng.standard_normal((n, 3))
        return v / np.linalg.norm(v, axis=1, keepdims=True)
    if domain == "ball":
        v = rng.standard_normal((n, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        r = rng.random(n) ** (1.0 / 3.0)
        return v * r[:, None]
    raise ValueError(f"unsupported jump domain {domain!r}")


def sample_jump(n, domain: str, seed, counts: Sequence[int] | None = None) -> Polygon3D:
    """Independent uniform vertices; multi-component via per-component counts."""
    rng = make_rng(seed)
    if counts is None:
        counts = [int(n)]
    comps = []
    for c in counts:
        if int(c) < 3:
            raise ValueError("jump components need >= 3 vertices")
        comps.append(_jump_points(rng, int(c), domain))
    return Polygon3D(tuple(comps))


def sample_gaussian_polygon(n: int, seed) -> Polygon3D:
    """Closed Gaussian walk: i.i.d. 3-normal steps recentred to sum to zero."""
    if n < 3:
        raise ValueError("need >= 3 steps")
    rng = make_rng(seed)
    while True:
        steps = rng.standard_normal((n, 3))
        steps -= steps.mean(axis=0)
        if np.linalg.norm(steps, axis=1).max() > 1e-12:
            break
    verts = np.vstack([np.zeros(3), np.cumsum(steps, axis=0)[:-1]])
    return Polygon3D((verts,))


def fourier_cutoff(n: int, scheme: str, alpha: float = 2.0,
                   rel_tail: float = 1e-6) -> int:
    """Truncation index: smallest K with relative tail variance < rel_tail.

    Variance weight of mode k is (w_k/k)^2.  For the sharp cutoff this is
    exactly n.
    """
    if scheme == "sharp-cutoff":
        return n

    def w(k: int) -> float:
        if scheme == "exp":
            return math.exp(-k / n)
        if scheme == "gauss":
            return math.exp(-((k / n) ** 2))
        if scheme == "power":
            return float(k) ** (-alpha)
        raise ValueError(f"unsupported Fourier scheme {scheme!r}")

    terms = []
    k = 1
    total = 0.0
    while True:
        v = (w(k) / k) ** 2
        terms.append(v)
        total += v
        if k > n and v < rel_tail * total * 1e-3:
            break
        if k > 10_000_000:
            raise ValueError("Fourier cutoff did not converge")
        k += 1
    tail = 0.0
    for K in range(len(terms), 0, -1):
        tail += terms[K - 1]
        if tail >= rel_tail * total:
            return K
    return 1


def sample_fourier_loop(n: int, scheme: str, points: int, seed,
                        alpha: float = 2.0) -> Polygon3D:
    """Random truncated Fourier loop sampled at equispaced parameter values."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if points < 12 * n:
        raise ValueError("undersampled loop: need points >= 12*n")
    rng = make_rng(seed)
    K = fourier_cutoff(n, scheme, alpha)
    ks = np.arange(1, K + 1, dtype=np.float64)
    if scheme == "sharp-cutoff":
        w = np.ones(K)
    elif scheme == "exp":
        w = np.exp(-ks / n)
    elif scheme == "gauss":
        w = np.exp(-((ks / n) ** 2))
    elif scheme == "power":
        w = ks ** (-alpha)
    else:
        raise ValueError(f"unsupported Fourier scheme {scheme!r}")
    z = rng.standard_normal((K, 3))
    zp = rng.standard_normal((K, 3))
    t = 2.0 * math.pi * np.arange(points) / points
    arg = np.outer(t, ks)
    basis_c = np.cos(arg) * (w / ks)
    basis_s = np.sin(arg) * (w / ks)
    verts = basis_c @ z + basis_s @ zp
    return Polygon3D((verts,))


def sample_braid_walk(m: int, length: int, closure, seed) -> BraidWord:
    """Uniform i.i.d. letters in {±1, ..., ±(m-1)}."""
    if m < 2 or length < 1:
        raise ValueError("need m >= 2 and length >= 1")
    rng = make_rng(seed)
    gens = rng.integers(1, m, size=length, dtype=np.int64)
    flips = 1 - 2 * rng.integers(0, 2, size=length, dtype=np.int64)
    return BraidWord(strands=m, letters=tuple(int(x) for x in gens * flips),
                     closure=Closure(closure))


def crisscross_word(base: str, **params) -> list[int]:
    """Unsigned generator sequence of a crisscross base curve.

    star(n) = flat-torus(n, 2n+1); billiard(a, b) alternates blocks of odd
    and even generators on a strands, b-1 blocks in total.
    """
    if base == "star":
        n = int(params["n"])
        return crisscross_word("flat-torus", p=n, q=2 * n + 1)
    if base == "flat-torus":
        p, q = int(params["p"]), int(params["q"])
        if p < 2 or q < 1:
            raise ValueError("flat torus needs p >= 2, q >= 1")
        return [(i % (p - 1)) + 1 for i in range((p - 1) * q)]
    if base == "billiard":
        a, b = int(params["a"]), int(params["b"])
        if a < 2 or b < 2 or math.gcd(a, b) != 1:
            raise ValueError("billiard needs coprime a, b >= 2")
        odd = list(range(1, a, 2))
        even = list(range(2, a, 2))
        word: list[int] = []
        for t in range(b - 1):
            word.extend(odd if t % 2 == 0 else even)
        return word
    raise ValueError(f"unknown crisscross base {base!r}")


def crisscross_sample_word(base: str, seed, **params) -> BraidWord:
    """Draw the coin-flipped signed word of a crisscross base curve."""
    word = crisscross_word(base, **params)
    rng = make_rng(seed)
    flips = 1 - 2 * rng.integers(0, 2, size=len(word), dtype=np.int64)
    strands = (int(params["p"]) if base == "flat-torus"
               else int(params["n"]) if base == "star"
               else int(params["a"]))
    letters = tuple(int(g * s) for g, s in zip(word, flips))
    return BraidWord(strands=strands, letters=letters)


def sample_crisscross(base: str, seed, **params) -> DiagramCode:
    """Crisscross model: the base word with every letter's exponent a fair coin."""
    return braid_closure_to_diagram(crisscross_sample_word(base, seed, **params))


# -- ModelSpec-driven sampling ---------------------------------------------------


def sample_object(spec: ModelSpec, rng: np.random.Generator):
    """Draw one raw sample (permutation, grid, braid, polygon, or diagram)."""
    p, o = spec.params, spec.options
    fam = spec.family
    if fam == "PetalumaKnot":
        return sample_petaluma(int(p["petals"]), rng)
    if fam == "PetalumaLink":
        return sample_petaluma_link(p["petals"], rng)
    if fam == "GridKnot":
        return sample_grid(int(p["n"]), rng)
    if fam == "Griddle":
        return sample_griddle(int(p["n"]), rng)
    if fam == "JumpPolygon":
        counts = p.get("counts")
        return sample_jump(p.get("n"), o.get("domain", "cube"), rng, counts=counts)
    if fam == "GaussianPolygon":
        return sample_gaussian_polygon(int(p["n"]), rng)
    if fam == "FourierLoop":
        n = int(p["n"])
        return sample_fourier_loop(n, o.get("scheme", "sharp-cutoff"),
                                   int(p.get("points", 12 * n)), rng,
                                   alpha=float(o.get("alpha", 2.0)))
    if fam == "BraidWalk":
        return sample_braid_walk(int(p["strands"]), int(p["length"]),
                                 o.get("closure", "trace"), rng)
    if fam == "FlatTorus":
        return sample_crisscross("flat-torus", rng, p=int(p["p"]), q=int(p["q"]))
    if fam == "Star":
        return sample_crisscross("star", rng, n=int(p["n"]))
    if fam == "Billiard":
        return sample_crisscross("billiard", rng, a=int(p["a"]), b=int(p["b"]))
    raise ValueError(f"unknown family {fam!r}")


def object_to_diagram(obj, rng: np.random.Generator) -> DiagramCode:
    """Convert a raw sample to its DiagramCode (projecting polygons generically)."""
    if isinstance(obj, DiagramCode):
        return obj
    if isinstance(obj, PetalPermutation):
        return grid_to_diagram(petal_to_grid(obj))
    if isinstance(obj, GridDiagram):
        return grid_to_diagram(obj)
    if isinstance(obj, BraidWord):
        return braid_closure_to_diagram(obj)
    if isinstance(obj, Polygon3D):
        return project_generic(obj, rng)
    raise TypeError(f"cannot convert {type(obj).__name__} to a diagram")


def sample_diagram(spec: ModelSpec, rng: np.random.Generator) -> DiagramCode:
    return object_to_diagram(sample_object(spec, rng), rng)
