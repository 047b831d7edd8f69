"""Community detection from relation strength matrices.

Build a relation strength matrix over a graph (shortest-path distance,
effective electrical resistance, similarity-network combination, or an
external matrix), threshold it at a community parameter epsilon, and
enumerate all maximal communities of the surviving relation graph.
"""

from .cli import PipelineConfig, PipelineResult, run_pipeline
from .community import (
    Community,
    EffectiveEdgeGraph,
    brute_force_maximal_communities,
    communities_to_csv,
    communities_to_dot,
    communities_to_json,
    enumerate_maximal_communities,
    is_community,
    refine,
)
from .datasets import builtin_dataset_names, load_builtin_dataset
from .errors import (
    AllZeroProfileError,
    DimensionMismatchError,
    DirectedInputError,
    DuplicateEdgeError,
    InvalidSpecError,
    NegativeEpsilonError,
    NumericalError,
    ParseError,
    RsmcError,
    SingularityError,
    TooLargeError,
    UnknownDatasetError,
    UnknownVertexError,
    WeightError,
)
from .graph import (
    ComponentPartition,
    Graph,
    connected_components,
    parse_edge_list,
    scale_weights,
    serialize_edge_list,
)
from .rsm import (
    ERF_TAG,
    EXTERNAL_TAG,
    SDF_TAG,
    SIMILARITY_TAG,
    RsmMatrix,
    RsmValidationReport,
    SpeedProfile,
    SpeedStats,
    Violation,
    check_scaling,
    erf_matrix,
    laplacian,
    laplacian_pseudoinverse,
    rsm_from_csv,
    rsm_from_json,
    rsm_to_csv,
    rsm_to_json,
    sdf_matrix,
    speed_profile_stats,
    validate_rsm,
)
from .similarity import (
    CaseTable,
    SimilaritySpec,
    SimilarityWarning,
    TableReport,
    combine_similarities,
    parse_similarity_json,
    validate_similarity_table,
)

__version__ = "0.1.0"

__all__ = [
    "AllZeroProfileError",
    "CaseTable",
    "Community",
    "ComponentPartition",
    "DimensionMismatchError",
    "DirectedInputError",
    "DuplicateEdgeError",
    "ERF_TAG",
    "EXTERNAL_TAG",
    "EffectiveEdgeGraph",
    "Graph",
    "InvalidSpecError",
    "NegativeEpsilonError",
    "NumericalError",
    "ParseError",
    "PipelineConfig",
    "PipelineResult",
    "RsmMatrix",
    "RsmValidationReport",
    "RsmcError",
    "SDF_TAG",
    "SIMILARITY_TAG",
    "SimilaritySpec",
    "SimilarityWarning",
    "SingularityError",
    "SpeedProfile",
    "SpeedStats",
    "TableReport",
    "TooLargeError",
    "UnknownDatasetError",
    "UnknownVertexError",
    "Violation",
    "WeightError",
    "brute_force_maximal_communities",
    "builtin_dataset_names",
    "check_scaling",
    "combine_similarities",
    "communities_to_csv",
    "communities_to_dot",
    "communities_to_json",
    "connected_components",
    "enumerate_maximal_communities",
    "erf_matrix",
    "is_community",
    "laplacian",
    "laplacian_pseudoinverse",
    "load_builtin_dataset",
    "parse_edge_list",
    "parse_similarity_json",
    "refine",
    "rsm_from_csv",
    "rsm_from_json",
    "rsm_to_csv",
    "rsm_to_json",
    "run_pipeline",
    "scale_weights",
    "sdf_matrix",
    "serialize_edge_list",
    "speed_profile_stats",
    "validate_rsm",
    "validate_similarity_table",
]
