"""Long-time behavior toolkit for one-dimensional stable-like symbols.

Given the coefficient triple (alpha(x), beta(x), gamma(x)) of a symbol
p(x, xi) = -i beta(x) xi + gamma(x) |xi|^alpha(x), this package decides
recurrence, transience and (weighted) ergodicity from drift conditions,
verifies the underlying generator asymptotics by singular-integral
quadrature, and corroborates verdicts by Monte Carlo simulation of a chain
with state-frozen stable increments.
"""

__version__ = "0.1.0"

from .coeffs import (SymbolTriple, ValidationGrid, parse_coefficient,
                     eval_coefficient, validate_triple, c_of_x,
                     load_symbol_file)
from .testfuncs import TestFunction, log_barrier, bounded_power, power_fn
from .generator import (QuadratureConfig, apply_generator,
                        apply_generator_terms, drift_profile, asymptotic_rhs,
                        test_function_for_mode)
from .classifier import (GridSpec, ClassifierConfig, Verdict, classify,
                         classify_f_ergodic, corollary_13, estimate_limsup,
                         estimate_liminf)
from .simulate import (SimConfig, simulate_ensemble, diagnostics,
                       sample_symmetric_stable, step_chain)
from . import specfun

__all__ = [
    "__version__",
    "SymbolTriple", "ValidationGrid", "parse_coefficient", "eval_coefficient",
    "validate_triple", "c_of_x", "load_symbol_file",
    "TestFunction", "log_barrier", "bounded_power", "power_fn",
    "QuadratureConfig", "apply_generator", "apply_generator_terms",
    "drift_profile", "asymptotic_rhs", "test_function_for_mode",
    "GridSpec", "ClassifierConfig", "Verdict", "classify",
    "classify_f_ergodic", "corollary_13", "estimate_limsup", "estimate_liminf",
    "SimConfig", "simulate_ensemble", "diagnostics",
    "sample_symmetric_stable", "step_chain",
    "specfun",
]
