"""Command-line front end: sampling, invariants, experiments, exports.

All randomness flows from --seed; worker count (--shards / KNOTLAB_SHARDS)
affects wall time only, never results.  Exit codes: 0 success, 1 I/O
failure, 2 invalid spec or model/invariant mismatch.
"""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from . import __version__
from .diagram import (
    BraidWord,
    DiagramCode,
    GridDiagram,
    PetalPermutation,
    petal_to_braid,
    validate_diagram,
)
from .experiments import (
    INVARIANTS,
    InvariantModelMismatch,
    exhaustive_enumeration,
    normalization_scales,
    run_experiment,
)
from .geometry import Polygon3D
from .samplers import (
    ModelSpec,
    crisscross_sample_word,
    object_to_diagram,
    sample_object,
    substream,
)

_MODEL_NAMES = {
    "petaluma": "PetalumaKnot",
    "petaluma-link": "PetalumaLink",
    "grid": "GridKnot",
    "griddle": "Griddle",
    "jump": "JumpPolygon",
    "gaussian": "GaussianPolygon",
    "fourier": "FourierLoop",
    "braid-walk": "BraidWalk",
    "flat-torus": "FlatTorus",
    "star": "Star",
    "billiard": "Billiard",
}

_FISH_BOUNDS = (-0.5, 1.0, 200, -1.5, 1.5, 200)


def _default_shards() -> int:
    env = os.environ.get("KNOTLAB_SHARDS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _csv_ints(text):
    return [int(x) for x in text.replace(",", " ").split()]


def _build_spec(spec, spec_file, model, **flags) -> ModelSpec:
    try:
        if spec:
            return ModelSpec.from_json(spec)
        if spec_file:
            with open(spec_file) as fh:
                return ModelSpec.from_json(fh.read())
        if not model:
            raise ValueError("give --model, --spec, or --spec-file")
        if model not in _MODEL_NAMES:
            raise ValueError(f"unknown model {model!r} (field: --model)")
        family = _MODEL_NAMES[model]
        params: dict = {}
        options: dict = {}
        if family == "PetalumaKnot":
            params["petals"] = _require(flags, "petals", model)
        elif family == "PetalumaLink":
            params["petals"] = _csv_ints(_require(flags, "component_petals", model))
        elif family in ("GridKnot", "Griddle"):
            params["n"] = _require(flags, "n_param", model)
        elif family == "JumpPolygon":
            if flags.get("counts"):
                params["counts"] = _csv_ints(flags["counts"])
            else:
                params["n"] = _require(flags, "n_param", model)
            options["domain"] = flags.get("domain") or "cube"
        elif family == "GaussianPolygon":
            params["n"] = _require(flags, "n_param", model)
        elif family == "FourierLoop":
            params["n"] = _require(flags, "n_param", model)
            if flags.get("points"):
                params["points"] = flags["points"]
            options["scheme"] = flags.get("scheme") or "sharp-cutoff"
            if flags.get("alpha") is not None:
                options["alpha"] = flags["alpha"]
        elif family == "BraidWalk":
            params["strands"] = _require(flags, "strands", model)
            params["length"] = _require(flags, "length", model)
            options["closure"] = flags.get("closure") or "trace"
        elif family == "FlatTorus":
            params["p"] = _require(flags, "p", model)
            params["q"] = _require(flags, "q", model)
        elif family == "Star":
            params["n"] = _require(flags, "n_param", model)
        elif family == "Billiard":
            params["a"] = _require(flags, "a", model)
            params["b"] = _require(flags, "b", model)
        return ModelSpec(family=family, params=params, options=options)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _require(flags, key, model):
    v = flags.get(key)
    if v is None:
        pretty = {"n_param": "--n", "component_petals": "--component-petals"}.get(
            key, "--" + key.replace("_", "-"))
        raise ValueError(f"model {model!r} needs {pretty}")
    return v


def _model_options(fn):
    opts = [
        click.option("--spec", default=None, help="inline ModelSpec JSON"),
        click.option("--spec-file", default=None, type=click.Path(), help="ModelSpec JSON file"),
        click.option("--model", default=None, help="model family shorthand"),
        click.option("--petals", type=int, default=None),
        click.option("--component-petals", "component_petals", default=None,
                     help="per-component petal counts, e.g. '20,20'"),
        click.option("--n", "n_param", type=int, default=None),
        click.option("--counts", default=None, help="jump model per-component counts"),
        click.option("--domain", type=click.Choice(["cube", "ball", "sphere", "gaussian"]),
                     default=None),
        click.option("--scheme", type=click.Choice(["sharp-cutoff", "exp", "gauss", "power"]),
                     default=None),
        click.option("--alpha", type=float, default=None),
        click.option("--points", type=int, default=None),
        click.option("--strands", type=int, default=None),
        click.option("--length", type=int, default=None),
        click.option("--closure", type=click.Choice(["trace", "plat"]), default=None),
        click.option("--p", type=int, default=None),
        click.option("--q", type=int, default=None),
        click.option("--a", type=int, default=None),
        click.option("--b", type=int, default=None),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _meta(spec: ModelSpec, seed: int, samples: int, command: str) -> dict:
    return {"command": command, "spec": json.loads(spec.to_json()),
            "seed": seed, "samples": samples, "version": __version__}


def _raw_obj(obj):
    if isinstance(obj, PetalPermutation):
        return {"heights": list(obj.heights)}
    if isinstance(obj, GridDiagram):
        return {"rho": list(obj.rho), "sigma": list(obj.sigma)}
    if isinstance(obj, BraidWord):
        return {"strands": obj.strands, "letters": list(obj.letters),
                "closure": obj.closure.value}
    if isinstance(obj, Polygon3D):
        return [c.tolist() for c in obj.components]
    if isinstance(obj, DiagramCode):
        return obj.to_obj()
    raise TypeError(type(obj).__name__)


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w"), True


@click.group()
@click.version_option(__version__)
def main():
    """Random knot models, finite-type invariants, Monte Carlo experiments."""


@main.command()
@_model_options
@click.option("-n", "--samples", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--shards", type=int, default=None,
              help="accepted for interface parity; sampling is per-index deterministic")
@click.option("--raw", is_flag=True, help="write raw permutations/polygons/words")
@click.option("-o", "--output", default=None, help="output path (default stdout)")
@click.option("--format", "fmt", type=click.Choice(["json", "jsonl"]), default="json",
              show_default=True)
def sample(spec, spec_file, model, samples, seed, shards, raw, output, fmt, **flags):
    """Draw serialized samples from a model."""
    mspec = _build_spec(spec, spec_file, model, **flags)
    meta = _meta(mspec, seed, samples, "sample")
    try:
        rows = []
        for i in range(samples):
            rng = substream(seed, i)
            obj = sample_object(mspec, rng)
            if raw:
                rows.append(_raw_obj(obj))
            else:
                rows.append(object_to_diagram(obj, rng).to_obj())
        fh, close = _open_out(output)
        try:
            if fmt == "jsonl":
                fh.write(json.dumps({"meta": meta}) + "\n")
                for r in rows:
                    fh.write(json.dumps(r, separators=(",", ":")) + "\n")
            else:
                json.dump({"meta": meta, "samples": rows}, fh, separators=(",", ":"))
                fh.write("\n")
        finally:
            if close:
                fh.close()
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        sys.exit(1)


def _read_diagrams(path):
    with open(path) as fh:
        text = fh.read()
    diagrams = []
    stripped = text.lstrip()
    if stripped.startswith("{"):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        for ln in lines:
            obj = json.loads(ln)
            if "meta" in obj and "samples" not in obj:
                continue
            diagrams.append(DiagramCode.from_obj(obj))
        return diagrams
    obj = json.loads(text)
    if isinstance(obj, dict):
        for r in obj.get("samples", []):
            diagrams.append(DiagramCode.from_obj(r))
    else:
        for r in obj:
            diagrams.append(DiagramCode.from_obj(r))
    return diagrams


@main.command()
@click.option("--input", "inp", required=True, type=click.Path(exists=True),
              help="diagram file from `knotlab sample`")
@click.option("--invariants", "invs", required=True,
              help="comma-separated: c2,v3,writhe,defect,det,lk")
@click.option("-o", "--output", default=None)
def invariants(inp, invs, output):
    """Evaluate invariants on serialized diagrams (JSONL records out)."""
    names = [x.strip() for x in invs.split(",") if x.strip()]
    for name in names:
        if name not in INVARIANTS:
            raise click.UsageError(f"unknown invariant {name!r} (field: --invariants)")
    try:
        diagrams = _read_diagrams(inp)
        fh, close = _open_out(output)
        try:
            for i, d in enumerate(diagrams):
                try:
                    vals = {name: _num(INVARIANTS[name](d)) for name in names}
                except ValueError as exc:
                    raise click.UsageError(str(exc)) from exc
                fh.write(json.dumps({"index": i, "invariants": vals}) + "\n")
        finally:
            if close:
                fh.close()
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        sys.exit(1)


def _num(x):
    from fractions import Fraction
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    return int(x) if isinstance(x, (int, np.integer)) else float(x)


@main.command()
@_model_options
@click.option("--invariants", "invs", required=True)
@click.option("-n", "--samples", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--shards", type=int, default=None, help="defaults to KNOTLAB_SHARDS or CPU count")
@click.option("--hist", "hists", multiple=True,
              help="1D histogram spec 'invariant:lo:hi:bins' (repeatable)")
@click.option("--fish", is_flag=True,
              help="write the 2D (c2/n^2, v3/n^3) histogram (petal knot models)")
@click.option("--raw-jsonl", default=None, help="also dump per-sample invariants")
@click.option("-o", "--output", required=True, help="output prefix")
def experiment(spec, spec_file, model, invs, samples, seed, shards, hists, fish,
               raw_jsonl, output, **flags):
    """Run a Monte Carlo experiment; write moments JSON and histogram CSV."""
    mspec = _build_spec(spec, spec_file, model, **flags)
    names = [x.strip() for x in invs.split(",") if x.strip()]
    shards = shards or _default_shards()
    hist_bounds = {}
    for h in hists:
        try:
            name, lo, hi, bins = h.split(":")
            hist_bounds[name] = (float(lo), float(hi), int(bins))
        except ValueError as exc:
            raise click.UsageError(f"bad --hist spec {h!r}") from exc
    hist2d = None
    if fish:
        scales = normalization_scales(mspec)
        if "c2" not in scales or {"c2", "v3"} - set(names):
            raise click.UsageError("--fish needs a petal knot model with invariants c2,v3")
        hist2d = ("c2", "v3", scales["c2"], scales["v3"], _FISH_BOUNDS)
    try:
        report = run_experiment(mspec, names, samples, seed=seed, shards=shards,
                                hist_bounds=hist_bounds or None, hist2d=hist2d,
                                raw_path=raw_jsonl)
    except InvariantModelMismatch as exc:
        raise click.UsageError(str(exc)) from exc
    try:
        obj = report.to_obj()
        obj["meta"] = _meta(mspec, seed, samples, "experiment")
        with open(f"{output}.moments.json", "w") as fh:
            json.dump(obj, fh, indent=2)
            fh.write("\n")
        for name, h in report.histograms.items():
            with open(f"{output}.{name}.hist.csv", "w") as fh:
                fh.write("bin_lo,bin_hi,count\n")
                for lo, hi, cnt in h.csv_rows():
                    fh.write(f"{lo:.9g},{hi:.9g},{cnt}\n")
        if report.histogram2d is not None:
            with open(f"{output}.fish.csv", "w") as fh:
                fh.write("x_lo,x_hi,y_lo,y_hi,count\n")
                for xlo, xhi, ylo, yhi, cnt in report.histogram2d.csv_rows():
                    fh.write(f"{xlo:.9g},{xhi:.9g},{ylo:.9g},{yhi:.9g},{cnt}\n")
        click.echo(f"wrote {output}.moments.json")
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        sys.exit(1)


@main.command()
@_model_options
@click.option("--invariants", "invs", required=True)
@click.option("-o", "--output", default=None)
def enumerate(spec, spec_file, model, invs, output, **flags):
    """Exact distribution over a finite model support."""
    mspec = _build_spec(spec, spec_file, model, **flags)
    names = [x.strip() for x in invs.split(",") if x.strip()]
    try:
        dists = exhaustive_enumeration(mspec, names)
    except (ValueError, InvariantModelMismatch) as exc:
        raise click.UsageError(str(exc)) from exc
    obj = {"meta": _meta(mspec, 0, 0, "enumerate"), "distributions": {}}
    for name, dist in dists.items():
        obj["distributions"][name] = {
            "support": dist.support,
            "mean": str(dist.mean),
            "variance": str(dist.variance),
            "histogram": {str(k): v for k, v in sorted(dist.counts.items(),
                                                       key=lambda kv: float(kv[0]))},
        }
    try:
        fh, close = _open_out(output)
        try:
            json.dump(obj, fh, indent=2)
            fh.write("\n")
        finally:
            if close:
                fh.close()
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        sys.exit(1)


@main.command("export-braid")
@_model_options
@click.option("-n", "--samples", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("-o", "--output", default=None)
def export_braid(spec, spec_file, model, samples, seed, output, **flags):
    """Export one braid word per sample (models with a braid form only)."""
    mspec = _build_spec(spec, spec_file, model, **flags)
    fam = mspec.family
    if fam not in ("PetalumaKnot", "BraidWalk", "FlatTorus", "Star", "Billiard"):
        raise click.UsageError(f"model {fam} has no braid export")
    try:
        fh, close = _open_out(output)
        try:
            for i in range(samples):
                rng = substream(seed, i)
                if fam == "PetalumaKnot":
                    word = petal_to_braid(sample_object(mspec, rng))
                elif fam == "BraidWalk":
                    word = sample_object(mspec, rng)
                elif fam == "FlatTorus":
                    word = crisscross_sample_word("flat-torus", rng,
                                                  p=mspec.params["p"], q=mspec.params["q"])
                elif fam == "Star":
                    word = crisscross_sample_word("star", rng, n=mspec.params["n"])
                else:
                    word = crisscross_sample_word("billiard", rng,
                                                  a=mspec.params["a"], b=mspec.params["b"])
                fh.write(" ".join(str(x) for x in word.letters) + "\n")
        finally:
            if close:
                fh.close()
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        sys.exit(1)


@main.command()
@click.option("--input", "inp", required=True, type=click.Path(exists=True))
def validate(inp):
    """Validate serialized diagrams; exit 2 when any diagram is invalid."""
    try:
        diagrams = _read_diagrams(inp)
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        sys.exit(1)
    bad = 0
    for i, d in enumerate(diagrams):
        rep = validate_diagram(d)
        if rep.ok:
            click.echo(f"diagram {i}: OK ({d.crossing_count} crossings, "
                       f"{d.component_count} components)")
        else:
            bad += 1
            for v in rep.violations:
                click.echo(f"diagram {i}: {v}")
    if bad:
        sys.exit(2)


if __name__ == "__main__":
    main()
