#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# exceptions.py

"""
Domain errors.

Every error subclasses a builtin so callers may catch either the specific
class or the generic ``ArithmeticError``/``ValueError``.
"""


class PoleError(ArithmeticError):
    """An argument landed on a pole of Gamma."""


class SingularityError(ArithmeticError):
    """A bi-index power was evaluated at zero with a non-integrable
    exponent."""


class NonConvergence(ArithmeticError):
    """An adaptive routine exhausted its budget.

    The best estimate reached so far is kept on ``estimate`` so callers can
    still report it.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class StencilError(ArithmeticError):
    """A finite-difference stencil touched a singular point."""


class PoleOnContour(ArithmeticError):
    """A pole family of a Mellin-Barnes integrand crosses the contour."""


class TailDivergence(ArithmeticError):
    """The fitted decay of a truncated sum or integral is too slow."""


class PlanError(ValueError):
    """A quadrature plan violates integrability or decay."""


class PatternError(ValueError):
    """A diagram vertex does not match the pattern of a rewrite rule."""


class ConstraintError(ValueError):
    """An index constraint (uniqueness, balance) does not hold."""


class ConfigError(ValueError):
    """Invalid configuration, case or grid file."""
