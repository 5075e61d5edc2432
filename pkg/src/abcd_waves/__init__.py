"""Bifurcating standing waves of Boussinesq abcd systems via Lyapunov-Schmidt reduction."""
__version__ = "0.1.0"

from .bifurcation import (
    BifCoefficients,
    BifParams,
    StandingWave,
    amplitude,
    amplitude_squared,
    bilinear_N,
    compute_coefficients,
    higher_order,
    ops_JKG,
    second_order_V2,
    standing_wave,
)
from .errors import (
    Beta2Zero,
    CompatibilityViolation,
    DomainError,
    EquivarianceError,
    NoBifurcation,
    OrderUnsupported,
    ResonanceError,
)
from .feasibility import ABCDParams, FeasibilityVerdict, classify, wellposedness_class
from .linearized import LinearizedOperator, apply_L0, pseudo_inverse, q0_project, symmetry_S, symmetry_T
from .resonance import ScaledParams, delta_bs, divisor_bound_bs, enumerate_sigma, uniqueness_certificate
from .spectral import FieldPair, FourierField, Parity, inner_product, multiply, norm
from .verify import ResidualReport, pde_residual, scaling_exponent
