"""Exact certificates for shift equivalence of matrices over subrings of the reals."""

from .clearing import (
    ClearedResult,
    ClearingStepReport,
    clear_degree_step,
    clear_traces,
    full_prop35,
    shrink_norm,
)
from .matrix import (
    Matrix,
    PolyMatrix,
    char_poly,
    det_exact,
    is_nilpotent,
    poly_norm,
    power_sums,
    spectral_radius_upper,
    sup_norm,
)
from .poly import Poly
from .ring import LaurentElement, in_subring
from .sharp import ElOp, ElOpLog, apply_oplog, badring_fixture, det_certificate, sharp_of
from .spectral import (
    SpectrumDescriptor,
    check_spectral_conditions,
    count_least_period_points,
    has_perron_value,
    is_primitive,
    moebius,
    net_trace,
    primitive_assembly,
)
from .sse import (
    ESSEWitness,
    SEWitness,
    SSEChain,
    nilpotent_extension_move,
    reduce_nonneg_nilpotent,
    similarity_move,
    sse_to_se,
    verify_esse,
    verify_se,
    verify_sse_chain,
)

__version__ = "0.1.0"
