"""Exact VC-dimension, epsilon-net, stabilizer and coset-regularity
computations on finite groups."""

from .errors import BudgetExceededError, GroupValidationError, InternalCheckError
from .groups import (
    DEFAULT_ORDER_CAP,
    FiniteGroup,
    GroupSubset,
    from_cayley_table,
    generated_subgroup,
    is_normal,
    is_subgroup,
    left_cosets,
    make_cyclic,
    make_dihedral,
    make_direct_product,
    make_symmetric,
    normal_core,
    setwise_stabilizer,
    symmetric_elements,
    to_cayley_table,
)
from .setsystem import (
    DEFAULT_WORK_BUDGET,
    SetSystem,
    ShatterResult,
    TranslateFamilySpec,
    VcResult,
    dual_system,
    is_shattered,
    nip_check,
    sauer_shelah_bound,
    shatter_function,
    shatter_profile,
    trace,
    translate_family,
    vc_dimension,
)
from .approx import (
    ApproximationCertificate,
    NetCertificate,
    empirical_frequency,
    eps_net,
    measure_level_set,
    random_eps_approximation,
    sample_size,
    trace_class_partition,
    verify_approximation,
)
from .stabilizers import (
    CoverResult,
    SimilarityPartition,
    StabilizerReport,
    covering_number,
    intersect_stabilizers,
    measure_equivalence_classes,
    stab_covering_witness,
    stab_eps,
    stab_zero_subgroup,
    stabilizer_core,
)
from .stratify import (
    GapReport,
    StratificationWitness,
    build_witness,
    diagonal_conjugation_family,
    shattered_set_from_witness,
    vc_gap_report,
)
from .regularity import (
    PipelineCandidate,
    PipelineResult,
    RegularityReport,
    coset_densities,
    irregular_fraction,
    regularity_pipeline,
)

__version__ = "0.1.0"
