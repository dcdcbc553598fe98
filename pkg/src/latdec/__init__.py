"""Lattice decoding toolkit.

LLL reduction with unimodular tracking, Babai decoders with their decoding
radii, Kannan's embedding decoder in single-call, multi-call, incremental,
list and soft-output variants, a uSVP-to-HSVP reduction over exact integer
duals, exact enumeration oracles, and a MIMO Monte-Carlo harness.
"""

from .babai import (
    DecodeResult,
    RadiusReport,
    lr_aided_decode,
    radius_report,
    sic_decode,
    sic_radius,
    sic_radius_lower_bound,
    worst_case_radius_lower_bound,
    zf_decode,
)
from .embedding import (
    CandidateList,
    EmbeddingStrategy,
    ExtendedBasis,
    build_extended,
    embed_decode,
    incr_embed_decode,
    list_embed_decode,
    param_exact,
    param_list,
    param_sic,
    rigorous_call_count,
    rigorous_decode,
    soft_output_llr,
    svp_gamma_lll,
    usvp_gamma_lll,
)
from .enumeration import (
    EnumBudget,
    MinimaReport,
    closest_vector,
    first_two_minima,
    ml_decode_finite,
    shortest_vector,
)
from .errors import (
    BudgetExceededError,
    ConfigError,
    DegenerateBasisError,
    SolverContractError,
)
from .harness import SimConfig, run_ber, run_factors, run_opcount, run_radius_campaign
from .lattice import (
    HermiteBound,
    dual_basis,
    hermite_bound,
    is_unimodular,
    lattice_determinant,
)
from .lll import (
    LllParams,
    QualityReport,
    ReductionResult,
    is_effectively_lll_reduced,
    is_lll_reduced,
    lll_reduce,
    reduction_quality,
    size_reduce_column,
)
from .matrix import OpCounter, QrFactors, det_from_r, pseudoinverse, qr_decompose
from .mimo import (
    ChannelInstance,
    Constellation,
    RegularizedSystem,
    apply_channel,
    bits_to_coords,
    coords_to_bits,
    draw_channel,
    lattice_matrix,
    mmse_gdfe,
    parse_generator_file,
    qam_constellation,
    realify,
    remap_to_constellation,
    stack_spacetime,
)
from .usvp import (
    HsvpSolver,
    complete_basis,
    lll_as_hsvp,
    primitive_part,
    project_orthogonal,
    reduce_usvp,
    scaled_dual,
)

__version__ = "0.1.0"
