"""Rigidity analysis of symmetric bar-joint frameworks.

The package block-diagonalizes rigidity matrices under a point-group action,
counts symmetric infinitesimal flexes and self-stresses, certifies
symmetry-preserving finite flexes by restricted-rank comparisons at regular
points, and traces certified flexes by predictor-corrector continuation.
"""

from .blocks import (
    BlockDecomposition,
    BrokenSymmetryError,
    MaxwellCounts,
    MaxwellRow,
    SymmetricMotionBasis,
    block_diagonalize,
    fully_symmetric_flexes,
    fully_symmetric_self_stresses,
    maxwell_counts,
    restricted_rank,
    symmetric_rigid_motions,
)
from .catalog import builtin_example, example_names
from .certify import (
    VERDICT_FINITE_FLEX,
    VERDICT_INCONCLUSIVE,
    VERDICT_NO_FLEX,
    DecisionPolicy,
    FlexCertificate,
    RegularityEvidence,
    finite_flex_decision,
    regular_in_fixed_space_test,
    sample_symmetric_configuration,
    sample_symmetric_generic,
    subrep_flex_decision,
)
from .documents import (
    AnalysisOptions,
    DocumentError,
    FrameworkDocument,
    build_framework,
    canonical_json,
    load_document,
    parse_document,
    render_document,
    save_document,
    validate_document,
)
from .frameworks import (
    Configuration,
    Framework,
    FrameworkError,
    Graph,
    RankReport,
    RigidityVerdict,
    RigidMotionBasis,
    edge_function,
    infinitesimal_rigidity_test,
    nullspace,
    numerical_rank,
    orthonormal_image,
    rigid_motion_generators,
    rigidity_matrix,
    subspace_distance,
)
from .groups import (
    GroupElement,
    GroupError,
    Representation,
    SymmetryGroup,
    TypeMap,
    TypeMapReport,
    external_representation,
    format_cycles,
    internal_representation,
    make_group,
    parse_cycles,
    validate_type_map,
)
from .irreps import (
    IrrepCharacter,
    IrrepTable,
    IsotypicBasis,
    character_table,
    fixed_subspace_basis,
    isotypic_bases,
    isotypic_projector,
)
from .tracing import (
    FlexPath,
    FlexTracer,
    NoSymmetricFlexError,
    PathReport,
    TraceError,
    path_validate,
    tangent_flex,
    trace_flex,
)

__version__ = "0.1.0"
