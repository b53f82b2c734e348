"""Hilbert-Kunz multiplicities of local rings over small finite fields,
with the constructive normal-form transformations that feed them."""

__version__ = "0.1.0"

from .errors import (
    HKError,
    InternalCheckError,
    KernelCapacityError,
    NeedsFieldExtension,
    NotAUnitError,
    NotMPrimaryError,
    NotPreparableError,
    ParseError,
    PreconditionError,
    ResourceError,
    RetryExhaustedError,
    RingMismatchError,
    SingularMatrixError,
    UnsupportedCharacteristicError,
)
from .field import (
    FieldElement,
    FieldSpec,
    artin_schreier_solve,
    element_degree,
    extend_field,
    ff_kth_root,
    ff_sqrt,
    find_irreducible,
)
from .poly import (
    MonomialOrder,
    Polynomial,
    PolyRing,
    Substitution,
    bracket_power,
    drop_variable,
    frobenius_power,
    homogeneous_component,
    homogeneous_components,
    lift_variable,
    linear_change,
    map_coefficients,
    parse_poly,
    poly_str,
    substitute,
)
from .groebner import (
    GroebnerBasis,
    Staircase,
    buchberger,
    colength,
    ideal_member,
    is_regular_sequence,
    krull_dimension,
    leading_staircase,
    normal_form,
)
from .hk import (
    FamilyScanResult,
    HKReport,
    LocalRingPresentation,
    family_scan,
    hk_colength,
    hk_estimate,
    hk_function,
    monsky_reference,
)
from .cache import (
    ColengthCache,
    cache_key,
    cached_colength,
    default_cache_dir,
)
from .reduce import (
    CIPresentation,
    ConjectureScanReport,
    ReductionTrace,
    ci_to_hypersurface,
    conjecture_scan,
    drop_regular_generators,
    eliminate_linear_variable,
    prepare_distinguished,
    reduce_pair,
)
from .ringfile import (
    RingFile,
    load_ring_file,
    parse_ring_file,
)
from .series import (
    DEGENERATE,
    DiagonalizationCertificate,
    PreparedForm,
    SQUARES_PLUS_CUBE,
    SUM_OF_SQUARES,
    TruncatedSeries,
    compose_series,
    diagonalize_hypersurface,
    diagonalize_quadratic_part,
    parse_series,
    quadric_complete,
    ts_inverse,
    ts_kth_root,
    ts_sqrt,
    verify_substitution,
    weierstrass_prepare,
)

__all__ = [
    "HKError",
    "InternalCheckError",
    "KernelCapacityError",
    "NeedsFieldExtension",
    "NotAUnitError",
    "NotMPrimaryError",
    "NotPreparableError",
    "ParseError",
    "PreconditionError",
    "ResourceError",
    "RetryExhaustedError",
    "RingMismatchError",
    "SingularMatrixError",
    "UnsupportedCharacteristicError",
    "FieldElement",
    "FieldSpec",
    "artin_schreier_solve",
    "element_degree",
    "extend_field",
    "ff_kth_root",
    "ff_sqrt",
    "find_irreducible",
    "MonomialOrder",
    "Polynomial",
    "PolyRing",
    "Substitution",
    "bracket_power",
    "drop_variable",
    "frobenius_power",
    "homogeneous_component",
    "homogeneous_components",
    "lift_variable",
    "linear_change",
    "map_coefficients",
    "parse_poly",
    "poly_str",
    "substitute",
    "GroebnerBasis",
    "Staircase",
    "buchberger",
    "colength",
    "ideal_member",
    "is_regular_sequence",
    "krull_dimension",
    "leading_staircase",
    "normal_form",
    "FamilyScanResult",
    "HKReport",
    "LocalRingPresentation",
    "family_scan",
    "hk_colength",
    "hk_estimate",
    "hk_function",
    "monsky_reference",
    "CIPresentation",
    "ConjectureScanReport",
    "ReductionTrace",
    "ci_to_hypersurface",
    "conjecture_scan",
    "drop_regular_generators",
    "eliminate_linear_variable",
    "prepare_distinguished",
    "reduce_pair",
    "DEGENERATE",
    "DiagonalizationCertificate",
    "PreparedForm",
    "SQUARES_PLUS_CUBE",
    "SUM_OF_SQUARES",
    "TruncatedSeries",
    "compose_series",
    "diagonalize_hypersurface",
    "diagonalize_quadratic_part",
    "parse_series",
    "quadric_complete",
    "ts_inverse",
    "ts_kth_root",
    "ts_sqrt",
    "verify_substitution",
    "weierstrass_prepare",
    "ColengthCache",
    "cache_key",
    "cached_colength",
    "default_cache_dir",
    "RingFile",
    "load_ring_file",
    "parse_ring_file",
]
