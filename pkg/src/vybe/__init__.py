"""Exact, windowed computations for vertex operator Yang-Baxter equations and Rota-Baxter operators."""

from .errors import (
    CarrierMismatch,
    ConstructionError,
    HypothesisViolated,
    LieAlgebraError,
    NotHomogeneous,
    NotSkewsymmetric,
    OutOfWindow,
    VybeError,
)
from .exact import GradedSpace, GradedVector, LevelwiseMatrix, PBWMonomial, Q, dual_pairing, linear_combine
from .lie import (
    LieLevelOne,
    LieMap,
    LieModuleOne,
    LieTensor,
    check_cybe,
    check_level_one_signs,
    check_lie_o_operator,
    check_projection_signs,
    cybe_brackets,
    cybe_terms,
    extend_level_one,
    level1_lie,
    level1_module,
    reduce_map,
    reduce_tensor,
    verify_reduction,
)
from .modules import (
    ContragredientModule,
    FockModule,
    SemidirectVOA,
    adjoint_module,
    contragredient,
    fock_module,
    intertwiner_WpW_Vp,
    intertwiner_WWp_Vp,
    module_mode_action,
    parse_module_descriptor,
    semidirect,
    skew_mode_action,
)
from .report import CheckReport
from .voa import (
    CurrentVOA,
    LieAlgebraData,
    affine_sl2,
    build_current_voa,
    generator_state,
    heisenberg,
    heisenberg_lie,
    m_dot,
    mode_action,
    primed_mode,
    primed_op_mode,
    sl2_lie,
    state,
    verify_module_axioms,
    verify_voa_axioms,
    virasoro_mode,
)
from .yang_baxter import (
    DiagonalTensor,
    LevelPreservingMap,
    TripleTensorComponent,
    build_r_from_T,
    check_blocks_against_strong_axioms,
    check_form_transport,
    check_relative_rbo,
    check_strong_rbo,
    check_tensor_operator_identity,
    check_voybe,
    form_transport,
    map_to_tensor,
    skewsymmetrize,
    tensor_to_map,
    triple_products,
    voybe_residual,
)

__version__ = "0.1.0"
