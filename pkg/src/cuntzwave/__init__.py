"""Wavelet filter banks and the Cuntz-algebra representations they define."""

__version__ = "0.1.0"

from .filters import (
    FilterBank,
    InvalidFilterError,
    ThetaPoint,
    ValidationReport,
    evaluate,
    from_theta,
    haar,
    high_pass_from_low,
    reflect_theta,
    substitute_odd,
    unitarity_check,
    validate,
)
from .cuntz_rep import (
    CorrelationSpace,
    IsometrySystem,
    RepresentationClassification,
    SpectrumReport,
    build_rho,
    build_sigma,
    build_V,
    classify,
    compute_H,
    intertwiner_basis,
    intertwiner_space_dim,
    k0_invariance_check,
    spectrum,
    state_eval,
)
from .cycles import CycleSet, FrameStatus, circle_zeros, find_cycles, frame_classify
from .cascade import (
    CascadeResult,
    CorrelationVector,
    cascade_father,
    cascade_mother,
    correlation_coeffs,
    discrepancy_check,
    mallat_product,
    mirror_check,
)
from .operators import (
    Signal,
    TrigPoly,
    apply_S,
    apply_S_star,
    intertwiner_U,
    reflect_W,
    settle_length,
    subband_analyze,
    subband_synthesize,
    verify_cuntz,
)

__all__ = [
    "FilterBank",
    "InvalidFilterError",
    "ThetaPoint",
    "ValidationReport",
    "evaluate",
    "from_theta",
    "haar",
    "high_pass_from_low",
    "reflect_theta",
    "substitute_odd",
    "unitarity_check",
    "validate",
    "CorrelationSpace",
    "IsometrySystem",
    "RepresentationClassification",
    "SpectrumReport",
    "build_rho",
    "build_sigma",
    "build_V",
    "classify",
    "compute_H",
    "intertwiner_basis",
    "intertwiner_space_dim",
    "k0_invariance_check",
    "spectrum",
    "state_eval",
    "CycleSet",
    "FrameStatus",
    "circle_zeros",
    "find_cycles",
    "frame_classify",
    "CascadeResult",
    "CorrelationVector",
    "cascade_father",
    "cascade_mother",
    "correlation_coeffs",
    "discrepancy_check",
    "mallat_product",
    "mirror_check",
    "Signal",
    "TrigPoly",
    "apply_S",
    "apply_S_star",
    "intertwiner_U",
    "reflect_W",
    "settle_length",
    "subband_analyze",
    "subband_synthesize",
    "verify_cuntz",
]
