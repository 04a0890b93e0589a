"""Distance-based phylogenetic tree building with robustness diagnostics.

Core surface: dissimilarity maps and their reductions, neighbor joining
(plus a quadratic-time variant), quartet/radius success conditions
checked against a reference tree, counterexample fixtures, and a
sequence-simulation benchmark.
"""

from .counterexamples import (
    DefectVerification,
    ReductionDefectInstance,
    example_eight_leaf,
    example_five_leaf,
    reduction_defect_instance,
    verify_reduction_defect,
)
from .diagnostics import (
    Condition,
    DiagnosticReport,
    GuaranteedEdge,
    GuaranteeKind,
    SStatistic,
    Witness,
    ab_consistent,
    atteson_radius_check,
    four_point_defect_lb,
    guaranteed_edges,
    quartet_additive,
    quartet_consistent,
    s_entry_case,
    s_entry_coefficient,
    s_statistic,
    scaled_z_matrix,
    z_edge_coefficient,
    z_entry_coefficient,
)
from .dissim import DissimilarityMap, linf_distance, parse_phylip, write_phylip
from .errors import MatrixError, NewickParseError, PhylipParseError, TreeError
from .njcore import (
    JoinStep,
    JoinTrace,
    Reduction,
    fnj,
    four_point_topology,
    nj,
    q_matrix,
    w_value,
    z_matrix,
)
from .simlab import (
    Alignment,
    SweepConfig,
    SweepRecord,
    SweepSummary,
    jc_distance,
    jc_evolve,
    log_spaced_lengths,
    records_to_csv,
    run_sweep,
    summaries_to_csv,
    summarize,
)
from .treemodel import (
    PhyloTree,
    QuartetTopology,
    Split,
    Taxon,
    parse_newick,
    random_tree,
    rf_distance,
)

__version__ = "0.1.0"

__all__ = [
    "Alignment",
    "Condition",
    "DefectVerification",
    "DiagnosticReport",
    "DissimilarityMap",
    "GuaranteeKind",
    "GuaranteedEdge",
    "JoinStep",
    "JoinTrace",
    "MatrixError",
    "NewickParseError",
    "PhyloTree",
    "PhylipParseError",
    "QuartetTopology",
    "Reduction",
    "ReductionDefectInstance",
    "SStatistic",
    "Split",
    "SweepConfig",
    "SweepRecord",
    "SweepSummary",
    "Taxon",
    "TreeError",
    "Witness",
    "ab_consistent",
    "atteson_radius_check",
    "example_eight_leaf",
    "example_five_leaf",
    "fnj",
    "four_point_defect_lb",
    "four_point_topology",
    "guaranteed_edges",
    "jc_distance",
    "jc_evolve",
    "linf_distance",
    "log_spaced_lengths",
    "nj",
    "parse_newick",
    "parse_phylip",
    "q_matrix",
    "quartet_additive",
    "quartet_consistent",
    "random_tree",
    "records_to_csv",
    "reduction_defect_instance",
    "rf_distance",
    "run_sweep",
    "s_entry_case",
    "s_entry_coefficient",
    "s_statistic",
    "scaled_z_matrix",
    "summaries_to_csv",
    "summarize",
    "verify_reduction_defect",
    "w_value",
    "write_phylip",
    "z_edge_coefficient",
    "z_entry_coefficient",
    "z_matrix",
]
