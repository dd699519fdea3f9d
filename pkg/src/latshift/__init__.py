"""Shifted rank-1 lattice rules: worst-case errors, CBC generating vectors
and CBC-constructed half-shifts."""

from .cbc import (
    CbcShiftResult,
    CbcVectorResult,
    cbc_shift,
    cbc_vector,
    zero_shift_kappas,
)
from .kernel import HalfShift, LatticeRule, RealShift, bernoulli2, frac, lattice_points, pair_kernel
from .quadrature import Integrand, apply_rule, make_integrand, random_shift_estimate
from .wce import (
    ErrorReport,
    error_report,
    euler_phi,
    half_shift_avg_sq_wce,
    kappa,
    shift_avg_sq_wce,
    squared_wce,
    theorem1_bound,
    theoretical_bound,
    zeta,
)
from .weights import ProductWeights, SubsetWeights, family_weights, parse_weight_spec, product_weight_of

__version__ = "0.1.0"
