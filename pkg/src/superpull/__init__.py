"""Sign-exact pullback calculus for superspace maps into a chart.

The core layers:

  grassmann  -- multi-indices and anticommutation sign combinatorics
  algebra    -- the free supercommutative algebra and exact polynomials
  pullback   -- nilpotent Taylor pullbacks, the exponential route, Berezin
  dops       -- operator calculus on the even coordinates, ideal, group
  numeric    -- independent floating-point verification path
  exprs      -- the shared expression grammar
  api        -- request/response dispatch used by both frontends
  service    -- FastAPI application
  cli        -- command-line client
"""

from .algebra import FuncDeriv, SPolynomial, SuperScalar, Symbol, substitute_numeric
from .dops import DOperatorContext, SMap
from .errors import (
    ContextError,
    DimensionMismatch,
    MissingBinding,
    OddComponentError,
    ParityMismatch,
    ParseError,
    SuperPullError,
)
from .grassmann import (
    EMPTY,
    EVEN,
    ODD,
    GeneratorSet,
    MultiIndex,
    SignedIndex,
    concat_sign,
    enumerate_indices,
    epsilon,
)
from .numeric import (
    NumericGrassmann,
    SmoothFn,
    coefficients_close,
    cos_fn,
    cross_check,
    eval_taylor,
    exp_fn,
    polynomial_fn,
    product_fn,
    sin_fn,
)
from .pullback import (
    OddTargetMap,
    Superfield,
    XiField,
    berezin,
    exp_xi_apply,
    product_form_apply,
    product_form_expand,
    pullback_odd_target,
    pullback_polynomial,
    pullback_taylor,
    reconstruct_xi,
)

__version__ = "0.1.0"

__all__ = [
    "ContextError",
    "DOperatorContext",
    "DimensionMismatch",
    "EMPTY",
    "EVEN",
    "FuncDeriv",
    "GeneratorSet",
    "MissingBinding",
    "MultiIndex",
    "NumericGrassmann",
    "ODD",
    "OddComponentError",
    "OddTargetMap",
    "ParityMismatch",
    "ParseError",
    "SMap",
    "SPolynomial",
    "SignedIndex",
    "SmoothFn",
    "SuperPullError",
    "SuperScalar",
    "Superfield",
    "Symbol",
    "XiField",
    "berezin",
    "coefficients_close",
    "concat_sign",
    "cos_fn",
    "cross_check",
    "enumerate_indices",
    "epsilon",
    "eval_taylor",
    "exp_fn",
    "exp_xi_apply",
    "polynomial_fn",
    "product_fn",
    "product_form_apply",
    "product_form_expand",
    "pullback_odd_target",
    "pullback_polynomial",
    "pullback_taylor",
    "reconstruct_xi",
    "sin_fn",
    "substitute_numeric",
]
