"""Generic planar projection of closed 3D polygons to diagram codes.

Projections are generic almost surely for the random models; degeneracies
(parallel overlaps, endpoint hits, triple points, height ties) are detected
within a fixed tolerance and reported via :class:`NonGenericProjection`, and
:func:`project_generic` simply retries with a fresh direction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .diagram import OVER, UNDER, DiagramCode

__all__ = [
    "Polygon3D",
    "ProjectionDirection",
    "NonGenericProjection",
    "project",
    "project_generic",
]

GENERICITY_TOL = 1e-9


class NonGenericProjection(Exception):
    """The projection direction hits a degeneracy; retry with another one."""


@dataclass(frozen=True)
class Polygon3D:
    """Closed polygonal curves in R^3 (last vertex connects back to first)."""

    components: tuple

    def __post_init__(self):
        comps = tuple(np.asarray(c, dtype=np.float64) for c in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("polygon needs at least one component")
        for c in comps:
            if c.ndim != 2 or c.shape[1] != 3:
                raise ValueError("each component must be an (n, 3) array")
            if c.shape[0] < 3:
                raise ValueError("each component needs at least 3 vertices")
            nxt = np.roll(c, -1, axis=0)
            if np.any(np.all(c == nxt, axis=1)):
                raise ValueError("consecutive vertices coincide")

    def to_json(self) -> str:
        return json.dumps([c.tolist() for c in self.components])

    @classmethod
    def from_json(cls, text: str) -> "Polygon3D":
        return cls(tuple(json.loads(text)))


@dataclass(frozen=True)
class ProjectionDirection:
    """Unit vector in R^3 (normalized within 1e-12)."""

    vector: tuple

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=np.float64)
        object.__setattr__(self, "vector", v)
        n = float(np.linalg.norm(v))
        if n == 0.0:
            raise ValueError("projection direction must be nonzero")
        if abs(n - 1.0) > 1e-12:
            raise ValueError("projection direction must be normalized")


def _frame(direction: np.ndarray):
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(direction)))] = 1.0
    e1 = np.cross(direction, axis)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(direction, e1)
    return e1, e2


def project(p: Polygon3D, direction: ProjectionDirection,
            tol: float = GENERICITY_TOL) -> DiagramCode:
    """Orthogonal projection along ``direction``; raises NonGenericProjection.

    Adjacent segments (sharing a vertex) never generate crossings.  Crossing
    roles come from heights along the direction; signs from the planar
    orientation of (over direction, under direction).
    """
    dirv = np.asarray(direction.vector, dtype=np.float64)
    e1, e2 = _frame(dirv)

    starts, ends, hs, he, comp_of, idx_in = [], [], [], [], [], []
    comp_sizes = []
    for ci, comp in enumerate(p.components):
        xy = np.column_stack([comp @ e1, comp @ e2])
        h = comp @ dirv
        nxt = np.roll(np.arange(comp.shape[0]), -1)
        starts.append(xy)
        ends.append(xy[nxt])
        hs.append(h)
        he.append(h[nxt])
        comp_of.append(np.full(comp.shape[0], ci))
        idx_in.append(np.arange(comp.shape[0]))
        comp_sizes.append(comp.shape[0])
    P = np.concatenate(starts)
    Q = np.concatenate(ends)
    H0 = np.concatenate(hs)
    H1 = np.concatenate(he)
    C = np.concatenate(comp_of)
    I = np.concatenate(idx_in)
    M = P.shape[0]
    D = Q - P

    ii, jj = np.triu_indices(M, k=1)
    same = C[ii] == C[jj]
    ni = np.array(comp_sizes)[C[ii]]
    gap = (I[jj] - I[ii]) % ni
    adjacent = same & ((gap == 1) | (gap == ni - 1))
    keep = ~adjacent
    ii, jj = ii[keep], jj[keep]

    di, dj = D[ii], D[jj]
    denom = di[:, 0] * dj[:, 1] - di[:, 1] * dj[:, 0]
    rel = P[jj] - P[ii]
    scale = np.maximum(np.abs(denom), 1e-300)
    ti = (rel[:, 0] * dj[:, 1] - rel[:, 1] * dj[:, 0]) / np.where(denom == 0, 1, denom)
    tj = (rel[:, 0] * di[:, 1] - rel[:, 1] * di[:, 0]) / np.where(denom == 0, 1, denom)

    li = np.linalg.norm(di, axis=1)
    lj = np.linalg.norm(dj, axis=1)
    near_parallel = np.abs(denom) < tol * li * lj
    if np.any(near_parallel):
        # degenerate only when the parallel lines nearly coincide and the
        # segments' spans along the common direction overlap
        perp = np.abs(rel[:, 0] * di[:, 1] - rel[:, 1] * di[:, 0]) / np.maximum(li, 1e-300)
        u = di / np.maximum(li, 1e-300)[:, None]
        c0 = (rel * u).sum(axis=1)
        c1 = ((rel + dj) * u).sum(axis=1)
        s_lo, s_hi = np.minimum(c0, c1), np.maximum(c0, c1)
        overlap = (s_hi > -tol) & (s_lo < li + tol)
        if np.any(near_parallel & (perp < tol * (1.0 + li)) & overlap):
            raise NonGenericProjection("near-parallel overlapping segments")
    inside = (ti > tol) & (ti < 1 - tol) & (tj > tol) & (tj < 1 - tol)
    border = ((ti > -tol) & (ti < 1 + tol) & (tj > -tol) & (tj < 1 + tol)) & ~inside
    if np.any(border & ~near_parallel):
        raise NonGenericProjection("intersection parameter within tolerance of an endpoint")
    inside &= ~near_parallel

    ii, jj, ti, tj = ii[inside], jj[inside], ti[inside], tj[inside]
    hi = H0[ii] + ti * (H1[ii] - H0[ii])
    hj = H0[jj] + tj * (H1[jj] - H0[jj])
    if np.any(np.abs(hi - hj) < tol):
        raise NonGenericProjection("height difference within tolerance at a crossing")

    i_over = hi > hj
    cross_z = D[ii][:, 0] * D[jj][:, 1] - D[ii][:, 1] * D[jj][:, 0]
    # sign = orientation of (over direction, under direction)
    signs = np.where(i_over, np.sign(cross_z), -np.sign(cross_z)).astype(np.int64)

    # triple-point guard: two crossings too close along one segment
    seg_ids = np.concatenate([ii, jj])
    params = np.concatenate([ti, tj])
    order = np.lexsort((params, seg_ids))
    ss, pp = seg_ids[order], params[order]
    same_seg = ss[1:] == ss[:-1]
    if np.any(same_seg & (np.diff(pp) < tol)):
        raise NonGenericProjection("two crossings within tolerance on one segment")

    ncross = ii.size
    cid = np.arange(ncross, dtype=np.int64)
    both_seg = np.concatenate([ii, jj])
    both_par = np.concatenate([ti, tj])
    both_cid = np.concatenate([cid, cid])
    both_role = np.concatenate([
        np.where(i_over, OVER, UNDER), np.where(i_over, UNDER, OVER),
    ]).astype(np.int8)
    both_sign = np.concatenate([signs, signs]).astype(np.int8)
    order = np.lexsort((both_par, both_seg))
    both_seg = both_seg[order]
    both_cid, both_role, both_sign = both_cid[order], both_role[order], both_sign[order]

    cids_out, roles_out, signs_out = [], [], []
    seg_base = 0
    for comp in p.components:
        hi = seg_base + comp.shape[0]
        mask = (both_seg >= seg_base) & (both_seg < hi)
        cids_out.append(both_cid[mask])
        roles_out.append(both_role[mask])
        signs_out.append(both_sign[mask])
        seg_base = hi
    return DiagramCode._from_arrays(cids_out, roles_out, signs_out)


def project_generic(p: Polygon3D, rng, max_attempts: int = 100) -> DiagramCode:
    """Project along random directions until one is generic (at most 100 tries)."""
    for _ in range(max_attempts):
        v = rng.standard_normal(3)
        n = np.linalg.norm(v)
        if n < 1e-12:
            continue
        v = v / n
        v /= np.linalg.norm(v)  # renormalize to satisfy the 1e-12 contract
        try:
            return project(p, ProjectionDirection(tuple(v)))
        except NonGenericProjection:
            continue
    raise NonGenericProjection(f"no generic direction found in {max_attempts} attempts")
