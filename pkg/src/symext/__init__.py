"""Symmetric-extendibility tests for quantum channels and bipartite states.

Decides whether a channel provably has zero one-way quantum capacity by
searching for a symmetric extension of its Choi state, and estimates a
normalized relative-entropy distance from any bipartite state to the
symmetrically extendible set.
"""

from .constructions import (
    ExampleFamilyParams,
    WernerOperators,
    boundary_isotropic_extension,
    example_extension,
    example_state,
    filtered_state,
    generalized_rank1_state,
    isotropic,
    isotropic_boundary_fidelity,
    rank1_extension_state,
    werner_operators,
)
from .extend import (
    FEASIBLE,
    INCONCLUSIVE,
    INFEASIBLE_NUMERICAL,
    CertificateResiduals,
    ChannelTestResult,
    ExtensionCertificate,
    ExtensionProblem,
    MapClosureRecord,
    SweepResult,
    SweepRow,
    bob_side_map_preserves,
    max_extendible_fidelity,
    run_isotropic_sweep,
    solve_extension,
    test_channel,
    verify_certificate,
)
from .param import (
    BoundReport,
    ParamResult,
    bound_report,
    distance_to_extendible,
    hashing_lower_bound,
    normalization_factor,
    two_copy_estimate,
)
from .quantum import (
    ChoiState,
    DensityMatrix,
    KrausChannel,
    apply_channel,
    choi_from_kraus,
    coherent_information,
    depolarizing_channel,
    embed_square,
    fidelity_maxent,
    kraus_from_choi,
    max_entangled_projector,
    negativity,
    relative_entropy,
    twirl_isotropic,
    von_neumann_entropy,
)

__version__ = "0.1.0"
