"""Simulation and numerical-analysis toolkit for a dynamic random graph with
uniform attachment and uniform vertex removal.

At every step a vertex is born with probability p = 1/2 + eps and links to
each alive vertex with probability min(beta/|V|, 1); otherwise a uniform
alive vertex is removed with all its edges. The package generates the
process exactly, samples its limiting neighbourhood tree, computes the
giant-component threshold from the kernel operator, and measures component /
distance / extreme-degree / concentration behaviour against the limit laws.
"""

__version__ = "0.1.0"

from .params import ModelParams
from .vertex_process import (
    MarkLedger,
    SurvivalPrediction,
    expected_survivor_rank_position,
    run_vertex_process,
    survival_probability_prediction,
    survivor_age_cdf_prediction,
)
from .graph_models import (
    LabeledGraph,
    SandwichTriple,
    default_delta_hat,
    export_edge_list,
    gbd_edge_probability,
    generate_drgvr,
    generate_gbd,
    generate_sandwich,
    import_edge_list,
)
from .local_limit import (
    BranchingTree,
    CanonicalBall,
    TvEstimate,
    canonicalize_ball,
    degree_mixture_pmf,
    degree_mixture_table,
    estimate_tv,
    offspring_means,
    sample_degree_mixture,
    sample_tree,
    survival_probability_mc,
)
from .spectral import (
    BetacBounds,
    DiscreteKernel,
    betac_bounds,
    betac_empirical,
    build_kernel,
    figure1_table,
    operator_norm,
    survival_gamma,
)
from .analysis import (
    ComponentReport,
    ConcentrationReport,
    DistanceReport,
    LambertPredictor,
    MaxDegreeReport,
    UnionFind,
    components,
    concentration_experiment,
    conditional_resample,
    distance_scaling_constants,
    edge_count_in_label_range,
    explore_ball,
    lambert_w0,
    max_degree_report,
    max_matching_greedy,
    predict_max_degree,
    prune,
    triangle_count_capped,
    typical_distance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
