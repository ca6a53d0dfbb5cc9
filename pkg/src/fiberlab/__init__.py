"""Fiber-wise multi-parameter Fourier multipliers on the discretized 2-torus."""

from .bumps import BumpProfile, DyadicSymbolFamily, Symbol1D, check_adapted, make_family, make_mother_bump
from .decomp import ConeDecomposition, CZDecomposition, cone_decompose, cone_reconstruct, cz_verify, fiberwise_cz, telescoping_check
from .grid import GridFunction2D, MixedNormSpec, Spectrum2D, forward_transform, inverse_transform, lp_norm, mixed_norm, random_field, weak_lp
from .lab import ExponentTuple, OpSpec, TrialRecord, known_range, norm_ratio_trial, refinement_study, sweep
from .operators import Symbol2D, Symbol4D, Symbol6D, T1, T2, U1, U2, bilinear_direct, tensor_bilinear, tripletwist, twisted_paraproduct

__version__ = "0.1.0"

__all__ = [
    "BumpProfile",
    "DyadicSymbolFamily",
    "Symbol1D",
    "check_adapted",
    "make_family",
    "make_mother_bump",
    "ConeDecomposition",
    "CZDecomposition",
    "cone_decompose",
    "cone_reconstruct",
    "cz_verify",
    "fiberwise_cz",
    "telescoping_check",
    "GridFunction2D",
    "MixedNormSpec",
    "Spectrum2D",
    "forward_transform",
    "inverse_transform",
    "lp_norm",
    "mixed_norm",
    "random_field",
    "weak_lp",
    "ExponentTuple",
    "OpSpec",
    "TrialRecord",
    "known_range",
    "norm_ratio_trial",
    "refinement_study",
    "sweep",
    "Symbol2D",
    "Symbol4D",
    "Symbol6D",
    "T1",
    "T2",
    "U1",
    "U2",
    "bilinear_direct",
    "tensor_bilinear",
    "tripletwist",
    "twisted_paraproduct",
]
