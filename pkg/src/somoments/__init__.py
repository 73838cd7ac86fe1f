"""Desk-scale laboratory for eigenvalue statistics of Haar SO(M), the
closed-form moment predictions they converge to, and the arithmetic and
Bessel-Mellin identities that tie the two together."""

__version__ = "0.1.0"

from .piecewise import PiecewisePolynomial, pp_from_text
from .testfn import (
    FixedKernels,
    TestFunction,
    eval_phi,
    ft_identity_residual,
    hat_self_convolution,
    make_fejer,
    make_hat_spline,
    sinc,
    sinc_moment,
)
from .predictions import (
    CompositionTerm,
    CumulantVector,
    MomentPrediction,
    centered_moment_prediction,
    composition_sum,
    cumulants_to_moments,
    kernel_K,
    mean_limit,
    q_n_multidim,
    r_n,
    sigma2,
    variance_limit,
)
from .rmt import (
    Eigenangles,
    EnsembleSpec,
    MomentEstimate,
    extract_eigenangles,
    mc_moments,
    sample_haar_so,
    z_statistic,
)
from .arith import (
    CharacterGroup,
    DirichletCharacter,
    SumParams,
    character_group,
    gauss_square_identity,
    gauss_sum,
    hecke_power_coeffs,
    kloosterman_char_expansion_r_residual,
    kloosterman_char_expansion_residual,
    kloosterman_sum,
    ramanujan_sum,
)
from .besselmellin import (
    BesselIntegralParams,
    IlsCheck,
    MellinPoint,
    bessel_j,
    bessel_mellin_residual,
    i_n_integral,
    ils_sum_residual,
    mellin_g,
)
from .vanishing import VanishingBound, moment_bound, order_vanishing_bound

__all__ = [
    "PiecewisePolynomial",
    "pp_from_text",
    "FixedKernels",
    "TestFunction",
    "make_fejer",
    "make_hat_spline",
    "eval_phi",
    "hat_self_convolution",
    "sinc",
    "sinc_moment",
    "ft_identity_residual",
    "MomentPrediction",
    "CompositionTerm",
    "CumulantVector",
    "mean_limit",
    "sigma2",
    "r_n",
    "variance_limit",
    "centered_moment_prediction",
    "q_n_multidim",
    "kernel_K",
    "composition_sum",
    "cumulants_to_moments",
    "EnsembleSpec",
    "Eigenangles",
    "MomentEstimate",
    "sample_haar_so",
    "extract_eigenangles",
    "z_statistic",
    "mc_moments",
    "DirichletCharacter",
    "CharacterGroup",
    "SumParams",
    "character_group",
    "gauss_sum",
    "ramanujan_sum",
    "kloosterman_sum",
    "kloosterman_char_expansion_residual",
    "kloosterman_char_expansion_r_residual",
    "gauss_square_identity",
    "hecke_power_coeffs",
    "BesselIntegralParams",
    "MellinPoint",
    "IlsCheck",
    "bessel_j",
    "mellin_g",
    "bessel_mellin_residual",
    "i_n_integral",
    "ils_sum_residual",
    "VanishingBound",
    "moment_bound",
    "order_vanishing_bound",
]
