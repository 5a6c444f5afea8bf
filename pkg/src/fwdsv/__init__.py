"""Fourier pricing of options on forward curves under affine stochastic volatility."""

from .basis import BasisSystem, SemigroupAction, laguerre, semigroup_adjoint_apply
from .curve import NelsonSiegelCurve
from .errors import (ConfigError, FourierDivergenceError, FwdsvError, NumericalError,
                     QuadratureConvergenceError, RiccatiBlowUpError)
from .montecarlo import McConfig, McEstimate, mc_mgf_wishart, mc_price_jump
from .pricer import PriceResult, PricingRequest, convergence_table, mgf, payoff_transform, price_option
from .riccati_jump import JumpModelParams, RiccatiEvaluation, StripPoint
from .riccati_wishart import RiccatiMatrixState, WishartModelParams, wishart_laplace, wishart_riccati_step

__all__ = [
    "BasisSystem", "SemigroupAction", "laguerre", "semigroup_adjoint_apply",
    "NelsonSiegelCurve",
    "FwdsvError", "ConfigError", "NumericalError", "QuadratureConvergenceError",
    "FourierDivergenceError", "RiccatiBlowUpError",
    "McConfig", "McEstimate", "mc_price_jump", "mc_mgf_wishart",
    "PricingRequest", "PriceResult", "price_option", "mgf", "payoff_transform", "convergence_table",
    "JumpModelParams", "StripPoint", "RiccatiEvaluation",
    "WishartModelParams", "RiccatiMatrixState", "wishart_riccati_step", "wishart_laplace",
]

__version__ = "0.1.0"
