"""Uncertainty-disturbance trade-offs for sequential projective measurements.

Value types (density matrices, bases, distributions, overlap matrices) are
immutable and validated at construction; everything else is pure functions:
divergences with their distance gauges, uncertainty measures, the relation
catalog with duals and counterexample search, and Monte-Carlo experiment
drivers. All stochastic entry points take explicit integer seeds.
"""

from .divergence import (
    DEFAULT_ALPHA_GRID,
    DIVERGENCE_KINDS,
    DivergenceSpec,
    cdiv,
    gauge_inverse,
    qdiv,
)
from .errors import QudError
from .experiments import (
    CoherenceBounds,
    ShotCounts,
    VolumeEstimate,
    coherence_bounds,
    estimate_coherence,
    estimate_volume,
    region_grid,
    simulate_shots,
    write_coherence_csv,
    write_region_csv,
    write_volume_csv,
)
from .qstate import (
    DensityMatrix,
    OrthonormalBasis,
    OverlapMatrix,
    ProbDist,
    SAMPLE_KINDS,
    dephase,
    fidelity,
    fourier_basis,
    make_basis,
    make_density,
    make_overlap,
    make_prob,
    outcome_dist,
    overlap_matrix,
    sample,
    sequential_dist,
    standard_basis,
    von_neumann_entropy,
)
from .relations import (
    Counterexample,
    RELATION_IDS,
    RelationId,
    RelationVerdict,
    dpi_margin,
    eval_relation,
    eval_with_dual,
    search_counterexample,
    table2_relations,
    universal_bound,
)
from .uncertainty import UMEASURE_KINDS, UncertaintySpec, majorizes, umeasure

__version__ = "0.1.0"

__all__ = [
    "CoherenceBounds",
    "Counterexample",
    "DEFAULT_ALPHA_GRID",
    "DIVERGENCE_KINDS",
    "DensityMatrix",
    "DivergenceSpec",
    "OrthonormalBasis",
    "OverlapMatrix",
    "ProbDist",
    "QudError",
    "RELATION_IDS",
    "RelationId",
    "RelationVerdict",
    "SAMPLE_KINDS",
    "ShotCounts",
    "UMEASURE_KINDS",
    "UncertaintySpec",
    "VolumeEstimate",
    "cdiv",
    "coherence_bounds",
    "dephase",
    "dpi_margin",
    "estimate_coherence",
    "estimate_volume",
    "eval_relation",
    "eval_with_dual",
    "fidelity",
    "fourier_basis",
    "gauge_inverse",
    "majorizes",
    "make_basis",
    "make_density",
    "make_overlap",
    "make_prob",
    "outcome_dist",
    "overlap_matrix",
    "qdiv",
    "region_grid",
    "sample",
    "search_counterexample",
    "sequential_dist",
    "simulate_shots",
    "standard_basis",
    "table2_relations",
    "umeasure",
    "universal_bound",
    "von_neumann_entropy",
    "write_coherence_csv",
    "write_region_csv",
    "write_volume_csv",
]
