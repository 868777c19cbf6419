"""
Thinning experiments, error metrics and synthetic test fields.
"""

from .synthetic_field import Regime, RegimeLayout, SyntheticFieldSpec, generate_synthetic_field
from .validation_harness import (
    ErrorStats,
    MethodSpec,
    MethodSummary,
    Thinning,
    ThinningSpec,
    ValidationReport,
    compare_methods,
    iter_thinnings,
    make_thinning,
    make_thinnings,
    parse_method_token,
    score,
)

__all__ = ['ErrorStats', 'MethodSpec', 'MethodSummary', 'Regime', 'RegimeLayout', 'SyntheticFieldSpec',
           'Thinning', 'ThinningSpec', 'ValidationReport', 'compare_methods', 'generate_synthetic_field',
           'iter_thinnings', 'make_thinning', 'make_thinnings', 'parse_method_token', 'score']
