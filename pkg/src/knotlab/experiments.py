"""Deterministic, shardable Monte Carlo experiments and exact enumerations.

The random stream is keyed by sample index, not by shard or thread: shard s
of S processes indices s, s+S, s+2S, ...; each index draws from its own
substream of the master seed.  Merged statistics are therefore independent
of the shard count (exactly for counts and histograms, to floating-point
merge accuracy for moments).
"""

from __future__ import annotations

import itertools
import json
import math
import multiprocessing
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import invariants as inv
from .diagram import DiagramCode, grid_to_diagram, petal_to_grid, PetalPermutation
from .samplers import ModelSpec, sample_diagram, substream
from .stats import (
    Histogram1D,
    Histogram2D,
    MomentsReport,
    TheoreticalBaseline,
    baseline_for,
    merge_moments,
)

__all__ = [
    "INVARIANTS",
    "ExperimentReport",
    "run_experiment",
    "ExactDistribution",
    "exhaustive_enumeration",
    "normalization_scales",
    "InvariantModelMismatch",
]


class InvariantModelMismatch(ValueError):
    """Requested invariant does not apply to the model's samples."""


def _lk01(d: DiagramCode):
    return inv.linking_number(d, 0, 1)


INVARIANTS = {
    "c2": inv.casson_c2,
    "v3": inv.v3,
    "writhe": inv.writhe,
    "defect": inv.defect,
    "det": inv.determinant,
    "lk": _lk01,
}

_MULTI_ONLY = {"lk"}
_SINGLE_ONLY = {"c2", "v3", "defect", "det"}


def check_applicability(spec: ModelSpec, invariant_names) -> None:
    multi = spec.family in ("PetalumaLink",) or (
        spec.family == "JumpPolygon" and len(spec.params.get("counts") or [1]) > 1)
    for name in invariant_names:
        if name not in INVARIANTS:
            raise InvariantModelMismatch(f"unknown invariant {name!r}")
        if name in _MULTI_ONLY and not multi:
            raise InvariantModelMismatch(f"{name} needs a multi-component model")
        if name in _SINGLE_ONLY and multi:
            raise InvariantModelMismatch(f"{name} needs a knot model")


def normalization_scales(spec: ModelSpec) -> dict:
    """Scales for normalized histogram axes (petal models: c2/n^2, v3/n^3, lk/4n)."""
    if spec.family == "PetalumaKnot":
        n = (int(spec.params["petals"]) - 1) // 2
        return {"c2": float(n * n), "v3": float(n ** 3)}
    if spec.family == "PetalumaLink":
        counts = spec.params["petals"]
        n = int(counts[0]) // 2
        return {"lk": float(4 * n)}
    return {}


def _shard_worker(args):
    spec_json, names, seed, indices = args
    spec = ModelSpec.from_json(spec_json)
    out = {name: np.empty(len(indices), dtype=np.float64) for name in names}
    for k, idx in enumerate(indices):
        rng = substream(seed, int(idx))
        d = sample_diagram(spec, rng)
        for name in names:
            out[name][k] = float(INVARIANTS[name](d))
    return out


@dataclass
class ExperimentReport:
    spec: ModelSpec
    seed: int
    samples: int
    shards: int
    moments: dict
    histograms: dict = field(default_factory=dict)
    histogram2d: Histogram2D | None = None
    baselines: dict = field(default_factory=dict)
    values: dict | None = None

    def to_obj(self) -> dict:
        obj = {
            "spec": json.loads(self.spec.to_json()),
            "seed": self.seed,
            "samples": self.samples,
            "shards": self.shards,
            "moments": {k: v.to_obj() for k, v in self.moments.items()},
            "baselines": {},
        }
        for name, (b, z) in self.baselines.items():
            obj["baselines"][name] = {
                "mean": b.mean,
                "variance": b.variance,
                "note": b.note,
                "z_score": z,
            }
        return obj


def run_experiment(spec: ModelSpec, invariant_names, samples: int, seed: int = 0,
                   shards: int = 1, hist_bounds: dict | None = None,
                   hist2d: tuple | None = None, keep_values: bool = False,
                   raw_path=None) -> ExperimentReport:
    """Sample the model, evaluate invariants, and accumulate statistics.

    hist_bounds: {invariant: (lo, hi, bins)} for 1D histograms.
    hist2d: (inv_x, inv_y, scale_x, scale_y, (xlo, xhi, xbins, ylo, yhi, ybins)).
    raw_path: JSON-lines sink, one {"index":..., "invariants":...} per sample.
    """
    if samples < 1 or shards < 1:
        raise ValueError("need samples >= 1 and shards >= 1")
    names = list(invariant_names)
    check_applicability(spec, names)
    spec_json = spec.to_json()
    index_sets = [np.arange(s, samples, shards, dtype=np.int64) for s in range(shards)]
    index_sets = [ix for ix in index_sets if ix.size]
    jobs = [(spec_json, names, seed, ix) for ix in index_sets]
    if len(jobs) == 1:
        shard_values = [_shard_worker(jobs[0])]
    else:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=min(len(jobs), multiprocessing.cpu_count())) as pool:
            shard_values = pool.map(_shard_worker, jobs)

    moments = {}
    for name in names:
        rep = MomentsReport()
        for sv in shard_values:
            rep = merge_moments(rep, MomentsReport.from_values(sv[name]))
        moments[name] = rep

    full = {name: np.empty(samples, dtype=np.float64) for name in names}
    for ix, sv in zip(index_sets, shard_values):
        for name in names:
            full[name][ix] = sv[name]

    histograms = {}
    for name, bounds in (hist_bounds or {}).items():
        lo, hi, bins = bounds
        h = Histogram1D(lo, hi, bins)
        h.add(full[name])
        histograms[name] = h

    histogram2d = None
    if hist2d is not None:
        ix_name, iy_name, sx, sy, (xlo, xhi, xb, ylo, yhi, yb) = hist2d
        histogram2d = Histogram2D(xlo, xhi, xb, ylo, yhi, yb)
        histogram2d.add(full[ix_name] / sx, full[iy_name] / sy)

    baselines = {}
    for name in names:
        b = baseline_for(spec.family, name, spec.params)
        if b is not None and b.mean is not None:
            rep = moments[name]
            z = (rep.mean - b.mean) / rep.sem if rep.sem > 0 else math.inf
            baselines[name] = (b, z)

    if raw_path is not None:
        with open(raw_path, "w") as fh:
            for i in range(samples):
                rec = {"index": i,
                       "invariants": {name: full[name][i] for name in names}}
                fh.write(json.dumps(rec) + "\n")

    return ExperimentReport(spec=spec, seed=seed, samples=samples, shards=shards,
                            moments=moments, histograms=histograms,
                            histogram2d=histogram2d, baselines=baselines,
                            values=full if keep_values else None)


# -- exhaustive enumeration ------------------------------------------------------


SUPPORT_LIMIT = 10_000_000


@dataclass
class ExactDistribution:
    """Exact value distribution over a finite model support."""

    support: int
    counts: Counter
    mean: Fraction
    variance: Fraction

    @classmethod
    def from_counter(cls, counts: Counter) -> "ExactDistribution":
        total = sum(counts.values())
        mean = Fraction(0)
        for v, c in counts.items():
            mean += Fraction(v) * c
        mean /= total
        var = Fraction(0)
        for v, c in counts.items():
            var += (Fraction(v) - mean) ** 2 * c
        var /= total
        return cls(support=total, counts=counts, mean=mean, variance=var)


def _enumerate_diagrams(spec: ModelSpec):
    fam = spec.family
    if fam == "PetalumaKnot":
        petals = int(spec.params["petals"])
        if math.factorial(petals) > SUPPORT_LIMIT:
            raise ValueError("support too large for exhaustive enumeration")
        for heights in itertools.permutations(range(petals)):
            yield grid_to_diagram(petal_to_grid(PetalPermutation(heights)))
        return
    if fam == "PetalumaLink":
        from .samplers import petal_link_diagram
        counts = [int(x) for x in spec.params["petals"]]
        total = sum(counts)
        if math.factorial(total) > SUPPORT_LIMIT:
            raise ValueError("support too large for exhaustive enumeration")
        for heights in itertools.permutations(range(total)):
            yield petal_link_diagram(counts, heights)
        return
    if fam in ("FlatTorus", "Star", "Billiard"):
        from .diagram import BraidWord, braid_closure_to_diagram
        from .samplers import crisscross_word
        if fam == "FlatTorus":
            word = crisscross_word("flat-torus", p=spec.params["p"], q=spec.params["q"])
            strands = int(spec.params["p"])
        elif fam == "Star":
            word = crisscross_word("star", n=spec.params["n"])
            strands = int(spec.params["n"])
        else:
            word = crisscross_word("billiard", a=spec.params["a"], b=spec.params["b"])
            strands = int(spec.params["a"])
        if 2 ** len(word) > SUPPORT_LIMIT:
            raise ValueError("support too large for exhaustive enumeration")
        for bits in range(2 ** len(word)):
            letters = tuple(g if (bits >> i) & 1 else -g for i, g in enumerate(word))
            yield braid_closure_to_diagram(BraidWord(strands=strands, letters=letters))
        return
    if fam == "GridKnot":
        from .diagram import GridDiagram
        n = int(spec.params["n"])
        if math.factorial(n) ** 2 > SUPPORT_LIMIT:
            raise ValueError("support too large for exhaustive enumeration")
        for rho in itertools.permutations(range(n)):
            for sigma in itertools.permutations(range(n)):
                yield grid_to_diagram(GridDiagram(rho=rho, sigma=sigma))
        return
    raise ValueError(f"exhaustive enumeration unsupported for {fam}")


_EXACT_FUNCS = {
    "c2": inv.casson_c2,
    "v3": inv.v3,
    "writhe": inv.writhe,
    "defect": inv.defect,
    "det": inv.determinant,
    "lk": _lk01,
}


def exhaustive_enumeration(spec: ModelSpec, invariant_names) -> dict:
    """Iterate the full finite support; exact rational mean/variance per invariant."""
    names = list(invariant_names)
    check_applicability(spec, names)
    counters = {name: Counter() for name in names}
    for d in _enumerate_diagrams(spec):
        for name in names:
            counters[name][_EXACT_FUNCS[name](d)] += 1
    return {name: ExactDistribution.from_counter(counters[name]) for name in names}
