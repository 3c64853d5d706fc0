"""knotlab: random knot/link models, fast finite-type invariants, Monte Carlo harness."""

from .backend import KERNEL_KIND
from .diagram import (
    BraidWord,
    Closure,
    CrossingVisit,
    DiagramCode,
    GridDiagram,
    PetalPermutation,
    TabulatedKnot,
    braid_closure_to_diagram,
    dt_code,
    flat_torus_diagram,
    grid_to_diagram,
    load_dt_fixtures,
    mirror,
    parse_dt,
    petal_to_braid,
    petal_to_grid,
    validate_diagram,
)
from .geometry import NonGenericProjection, Polygon3D, ProjectionDirection, project, project_generic
from .invariants import (
    alexander,
    casson_c2,
    conway,
    defect,
    determinant,
    eval_formula,
    bundled_formula,
    jones_oracle,
    linking_number,
    v3,
    writhe,
)
from .samplers import (
    ModelSpec,
    make_rng,
    sample_braid_walk,
    sample_crisscross,
    sample_diagram,
    sample_fourier_loop,
    sample_gaussian_polygon,
    sample_grid,
    sample_griddle,
    sample_jump,
    sample_petaluma,
    sample_petaluma_link,
    substream,
)
from .experiments import ExperimentReport, exhaustive_enumeration, run_experiment
from .stats import Histogram1D, Histogram2D, MomentsReport, ks_statistic, logistic_cdf, merge_moments

__version__ = "0.1.0"
