#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# mellinbarnes.py

"""
Mellin-Barnes sum-integrals over the principal series.

Every integration variable is a separated point ``u = -i n/2 + nu`` and is
summed and integrated with ``sum_n int dnu``: ``n`` runs over the integers
(or the half-integers) and ``nu`` over the real line. The integrand is an
:class:`~pysl2c.symalg.AFactorProduct` in which each variable enters every
a-factor argument with coefficient ``+i`` or ``-i``. The poles of such a
factor form one ladder in ``nu`` that runs either up or down, and the
contour is valid when every ladder starts on its own side of it.

:func:`evaluate_mb` integrates each ``n``-term over ``[-cutoff, cutoff]``
by adaptive Gauss-Kronrod, adds the two ``nu``-tails (through a fitted
power law, or period by period with Wynn acceleration when a power of an
external base oscillates) and extrapolates the ``n``-sum beyond ``n_max``
with a fitted ``C |n|^-s``.
"""

import cmath
import functools
import itertools
import logging
import math
import time
from collections import namedtuple
from fractions import Fraction

import numpy as np
from scipy import special

from .constants import GAP_TOL, POLE_TOL
from .diagrams import verify_relation
from .exceptions import (ConstraintError, PlanError, PoleOnContour,
                         SingularityError, TailDivergence)
from .planequad import (DEFAULT_ABS_FLOOR, DEFAULT_BUDGET, IntegralEstimate,
                        QuadPlan, Singularity, accelerated_sum,
                        integrate_interval, integrate_plane)
from .report import Report
from .sov import (ChainConfig, richardson, smeared_orthogonality,
                  smeared_window)
from .specfun import BiIndex, SeparatedPoint, Spin, power_bi
from .symalg import (ANTI, HOLO, AffineExpr, AFactorProduct, Binding, I,
                     QComplex, bind, grid_binding, gustafson_integrand,
                     gustafson_rhs, mellin_index)
from .utils import rel_dev

log = logging.getLogger(__name__)

DEFAULT_N_MAX = 32
DEFAULT_CUTOFF = 40.0
# Terms used by the n-tail fit, on each side of the lattice.
TAIL_TERMS = 8
OSCILLATION_TOL = 1e-3
MAX_NU = 1e12
COHERENCE_TOL = 0.1
NEGLIGIBLE = 1e-2

ANCHORS = {
    'gustafson': 'complex Gustafson integral: 1/(N-1)! prod sum_n int '
                 'dnu/(2 pi) prod a(1 + i(x_k - u_j)) a(1 + i(u_j - x\'_k)) '
                 '/ prod a(1 + i(u_j - u_m)) a(1 + i(u_m - u_j)) = '
                 'prod a(1 + i(x_k - x\'_j)) / a(1 + i(X - X\'))',
    'mb_star': 'Mellin-Barnes star-triangle: 2 pi prod a(1 - b_i) '
               'a(1/2 + b_i/2 - l_(i,i+1)) / a(1/2 - b_i/2 - l_(i,i+1)) = '
               'int Dg prod a(1 - b_i/2 - g + l_(i-1)) / '
               'a(b_i/2 - g + l_(i-1))',
    'mb_star_coherence': 'star-triangle by two routes: int d^2w prod '
                         '[z_i - w]^(b_i - 1) over its triangle equals the '
                         'Mellin-Barnes sum-integral over its closed '
                         'product, at the same b_i',
    'mb_propagator': 'propagator: [w - z]^(b - 1) = 1/(2 pi) a(1 - b) '
                     'int Da a(1/2 + b/2 - a) / a(1/2 - b/2 - a) '
                     '[z]^(-1/2 + b/2 - a) [w]^(-1/2 + b/2 + a)',
    'mellin_orthogonality': 'int d^2z [z]^(-1 + a) = 2 pi^2 delta(a)',
    'mellin_pair': 'f(z) = int Da [z]^(-1/2 - a) f^(a) with '
                   'f^(a) = 1/(2 pi^2) int d^2z [z]^(-1/2 + a) f(z)',
}


def _p(name):
    return AffineExpr.param(name)


def _point(value):
    if isinstance(value, SeparatedPoint):
        return value
    if isinstance(value, dict):
        return SeparatedPoint(**value)
    return SeparatedPoint(*value)


def _bi_index(value):
    if isinstance(value, BiIndex):
        return value
    if isinstance(value, dict):
        return BiIndex(**value)
    if isinstance(value, (list, tuple)):
        return BiIndex(*value)
    return BiIndex(value)


# Contours
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

class ContourVariable(namedtuple('ContourVariable', [
        'name', 'n_max', 'cutoff', 'offset', 'lattice_shift'])):

    """One variable ``u = -i n/2 + nu`` of a sum-integral.

    ``n`` runs over ``lattice_shift + Z`` with ``|n| <= n_max`` and ``nu``
    over the line ``i offset + R``, integrated directly on
    ``[-cutoff, cutoff]`` and by tail extrapolation beyond.
    """

    __slots__ = ()

    def __new__(cls, name, n_max=DEFAULT_N_MAX, cutoff=DEFAULT_CUTOFF,
                offset=0.0, lattice_shift=0):
        if isinstance(lattice_shift, (list, tuple)):
            lattice_shift = Fraction(*lattice_shift)
        lattice_shift = Fraction(lattice_shift).limit_denominator(2)
        if lattice_shift not in (0, Fraction(1, 2)):
            raise PlanError('invalid contour: lattice shift {} of `{}` must '
                            'be 0 or 1/2'.format(lattice_shift, name))
        if int(n_max) < TAIL_TERMS:
            raise PlanError('invalid contour: n_max = {} of `{}` leaves fewer '
                            'than {} terms for the tail fit'.format(
                                n_max, name, TAIL_TERMS))
        if not cutoff > 0:
            raise PlanError('invalid contour: cutoff {} of `{}` must be '
                            'positive'.format(cutoff, name))
        return super().__new__(cls, str(name), int(n_max), float(cutoff),
                               float(offset), lattice_shift)

    def lattice(self):
        """The values of ``n``, ascending.

        >>> ContourVariable('u', n_max=8, lattice_shift=0.5).lattice()[:2]
        [-7.5, -6.5]
        """
        shift = float(self.lattice_shift)
        stop = self.n_max + (1 if shift == 0 else 0)
        return [k + shift for k in range(-self.n_max, stop)]

    def serializable(self):
        return {'name': self.name, 'n_max': self.n_max,
                'cutoff': self.cutoff, 'offset': self.offset,
                'lattice_shift': self.lattice_shift}


class ContourSpec(namedtuple('ContourSpec', [
        'variables', 'target_rel_error', 'max_evaluations'])):

    """The variables of a sum-integral with the quadrature target and the
    evaluation budget of each one-dimensional pass."""

    __slots__ = ()

    def __new__(cls, variables=(), target_rel_error=1e-5,
                max_evaluations=DEFAULT_BUDGET):
        parsed = []
        for v in variables:
            if isinstance(v, ContourVariable):
                parsed.append(v)
            elif isinstance(v, dict):
                parsed.append(ContourVariable(**v))
            else:
                parsed.append(ContourVariable(v))
        names = [v.name for v in parsed]
        if len(set(names)) != len(names):
            raise PlanError('invalid contour: repeated variable in '
                            '{}'.format(names))
        if not target_rel_error > 0:
            raise PlanError('invalid contour: target_rel_error must be '
                            'positive')
        return super().__new__(cls, tuple(parsed), float(target_rel_error),
                               int(max_evaluations))

    @classmethod
    def over(cls, names, n_max=DEFAULT_N_MAX, cutoff=DEFAULT_CUTOFF,
             lattice_shift=0, **kwargs):
        return cls([ContourVariable(name, n_max, cutoff,
                                    lattice_shift=lattice_shift)
                    for name in names], **kwargs)

    @classmethod
    def from_dict(cls, d):
        return cls(d.get('variables', ()), d.get('target_rel_error', 1e-5),
                   d.get('max_evaluations', DEFAULT_BUDGET))

    @property
    def names(self):
        return [v.name for v in self.variables]

    def renamed(self, names):
        """The same contour with its variables renamed in order.

        A single variable is repeated for every name; an empty contour gets
        the default variables.
        """
        variables = self.variables
        if not variables:
            variables = tuple(ContourVariable(name) for name in names)
        elif len(variables) == 1:
            variables = variables * len(names)
        if len(names) != len(variables):
            raise PlanError('invalid contour: {} variables given, {} '
                            'needed'.format(len(variables), len(names)))
        return self._replace(variables=tuple(
            v._replace(name=name) for v, name in zip(variables, names)))

    def with_n_max(self, n_max):
        return self._replace(variables=tuple(
            ContourVariable(v.name, n_max, v.cutoff, v.offset,
                            v.lattice_shift) for v in self.variables))

    def serializable(self):
        return {'variables': list(self.variables),
                'target_rel_error': self.target_rel_error,
                'max_evaluations': self.max_evaluations}


# Integrands
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def _slopes(expr, name):
    """Rates of change of both slots of ``expr`` along ``nu`` of ``name``."""
    holo = expr.holo.coefficient(name, HOLO) + expr.holo.coefficient(name,
                                                                     ANTI)
    anti = expr.anti.coefficient(name, HOLO) + expr.anti.coefficient(name,
                                                                     ANTI)
    return holo, anti


class MBIntegrand(namedtuple('MBIntegrand', [
        'product', 'measure_constant', 'values', 'bases'])):

    """An a-factor product to be summed and integrated over some of its
    parameters.

    ``values`` binds the remaining parameters, ``bases`` the external bases
    of the product's powers. ``measure_constant`` is an exact constant (a
    rational times a power of pi) that multiplies the result after the
    quadrature.
    """

    __slots__ = ()

    def __new__(cls, product, measure_constant=None, values=None, bases=None):
        if measure_constant is None:
            measure_constant = AFactorProduct.constant()
        elif not isinstance(measure_constant, AFactorProduct):
            measure_constant = AFactorProduct.constant(measure_constant)
        return super().__new__(cls, product, measure_constant,
                               dict(values or {}), dict(bases or {}))

    def check_variables(self, names):
        """Each variable must occur, and only with coefficients ``+-i``.

        Raises:
            PlanError: Otherwise.
        """
        params = self.product.params()
        for name in names:
            if name in self.values:
                raise PlanError('invalid integrand: variable `{}` is also '
                                'bound to a value'.format(name))
            if name not in params:
                raise PlanError('invalid integrand: variable `{}` does not '
                                'occur'.format(name))
            for expr in self.product.numerator + self.product.denominator:
                if name not in expr.params():
                    continue
                holo, anti = _slopes(expr, name)
                if holo != anti or holo.re != 0 or abs(holo.im) != 1:
                    raise PlanError(
                        'invalid integrand: `{}` enters a{} with coefficient '
                        '{}, not +-i'.format(name, expr, holo))

    def evaluate(self, bindings):
        values = dict(self.values)
        values.update(bindings)
        return self.product.evaluate(values, self.bases)

    def frequency(self, name):
        """Angular frequency in ``nu`` of the powers ``[b]^E``.

        ``[b]^E`` depends on ``nu`` through ``|b|^(E + E_bar)``, a pure
        phase when the variable enters with coefficients ``+-1`` or ``+-i``.
        """
        omega = 0.0
        for tag, expr in self.product.extra_powers:
            if name not in expr.params():
                continue
            if tag not in self.bases:
                raise PlanError('invalid integrand: no value given for base '
                                '`{}`'.format(tag))
            holo, anti = _slopes(expr, name)
            omega += complex(holo + anti).imag * math.log(
                abs(complex(self.bases[tag])))
        return omega


def _point_binding(n, nu):
    """Scalar binding at ``(n, nu)``; ``n`` may be a half-integer."""
    return Binding(-0.5j * n + nu, 0.5j * n + nu,
                   QComplex(0, -Fraction(float(n))))


def _ladder_factors(product, name, names):
    """Numerator factors that depend on ``name`` and no other variable.

    Denominators are pole-free here: genuine poles are put in the numerator
    with ``1/a(E) = a((1 - E)_flipped)``, and the pairwise measure is kept
    in its polynomial form.
    """
    others = set(names) - {name}
    return [expr for expr in product.numerator
            if name in expr.params() and not expr.params() & others]


def first_pole(expr, name, n, values, offset=0.0):
    """Where the pole ladder of ``a(expr)`` in ``nu`` starts.

    ``a(E)`` has a pole where both slots of ``E`` are positive integers.
    Along ``nu`` the anti-holomorphic slot moves as ``anti + c t``, so the
    poles are ``t_m = (m - anti) / c`` for ``m >= max(1, 1 - gap)``.

    Returns:
        tuple(int, complex): The direction of the ladder (``+1`` up, ``-1``
        down) and its first pole in ``t = nu - i offset``.
    """
    bindings = bind(values)
    bindings[name] = _point_binding(n, 1j * offset)
    holo, anti = expr.values(bindings)
    slope = complex(_slopes(expr, name)[1])
    gap = int(round((holo - anti).real))
    m = max(1, 1 - gap)
    direction = 1 if (1 / slope).imag > 0 else -1
    return direction, (m - anti) / slope


def check_contour(integrand, contour):
    """Raise PoleOnContour unless every pole ladder lies on its own side.

    Up-running ladders must start above the contour and down-running ones
    below, for every ``n`` on the lattice.
    """
    names = contour.names
    for var in contour.variables:
        factors = _ladder_factors(integrand.product, var.name, names)
        for n in var.lattice():
            for expr in factors:
                direction, t = first_pole(expr, var.name, n,
                                          integrand.values, var.offset)
                if direction * t.imag <= POLE_TOL:
                    raise PoleOnContour(
                        'invalid contour: the pole ladder of a{} in `{}` at '
                        'n = {} starts at nu = {:.6g}, {} the contour'.format(
                            expr, var.name, n, t + 1j * var.offset,
                            'on' if abs(t.imag) <= POLE_TOL else
                            'on the wrong side of'))


# Tails
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def decay_exponent(g, cutoff):
    """``d`` in ``|g(t)| ~ t^-d``, fitted at ``cutoff * (1, 2, 4, 8)``.

    Infinite when ``g`` vanishes there.

    >>> round(decay_exponent(lambda t: 3 / t ** 2.5, 10.0), 12)
    2.5
    """
    t = cutoff * 2.0 ** np.arange(4)
    magnitude = np.abs(np.asarray(g(t), dtype=complex))
    if not np.all(np.isfinite(magnitude)):
        raise TailDivergence('nu-tail: non-finite integrand at {}'.format(t))
    keep = magnitude > 0
    if np.count_nonzero(keep) < 2:
        return math.inf
    return -float(np.polyfit(np.log(t[keep]), np.log(magnitude[keep]), 1)[0])


def _nu_tail(g, cutoff, omega, target_rel_error, abs_floor, budget, what):
    """``int_cutoff^inf g(t) dt``."""
    decay = decay_exponent(g, cutoff)
    if decay == math.inf:
        return IntegralEstimate(0j, 0.0, 4, True)
    if abs(omega) > OSCILLATION_TOL:
        if decay <= 0:
            raise TailDivergence('{}: oscillatory nu-tail amplitude grows '
                                 'like t^{:.3g}'.format(what, -decay))
        step = math.pi / abs(omega)
        intervals = ((cutoff + k * step, cutoff + (k + 1) * step)
                     for k in itertools.count())

        def term(lo, hi):
            return integrate_interval(g, lo, hi, target_rel_error / 10,
                                      abs_floor / 10, budget, strict=False)

        return accelerated_sum(intervals, term, target_rel_error, abs_floor,
                               budget, what + ' (oscillatory nu-tail)')
    if decay <= 1:
        raise TailDivergence('{}: nu-tail decays like t^-{:.3g}, which is not '
                             'integrable'.format(what, decay))
    power = 2.0 / (decay - 1.0)

    def mapped(tau):
        # t = cutoff tau^-power; the integrand vanishes like tau at tau = 0.
        tau = np.asarray(tau, dtype=float)
        t = cutoff * tau ** -power
        out = np.zeros(tau.shape, dtype=complex)
        inside = t < MAX_NU
        if inside.any():
            out[inside] = (np.asarray(g(t[inside]), dtype=complex) * cutoff *
                           power * tau[inside] ** (-power - 1))
        return out

    return integrate_interval(mapped, 0.0, 1.0, target_rel_error, abs_floor,
                              budget, strict=False)


def _fit_power(ns, terms):
    """Least squares for ``log t = c - s log n`` (phases unwrapped).

    Returns ``(c, s, residual)`` with the largest residual of the fit.
    """
    x = np.log(np.asarray(ns, dtype=float))
    terms = np.asarray(terms, dtype=complex)
    y = np.log(np.abs(terms)) + 1j * np.unwrap(np.angle(terms))
    design = np.column_stack([np.ones_like(x), -x]).astype(complex)
    coefficients = np.linalg.lstsq(design, y, rcond=None)[0]
    residual = float(np.max(np.abs(design @ coefficients - y)))
    return complex(coefficients[0]), complex(coefficients[1]), residual


def power_tail(s, N):
    """``sum_{k >= 1} (N + k)^-s`` by Euler-Maclaurin, for ``Re s > 1``.

    >>> abs(power_tail(3.0, 40.0) - special.zeta(3.0, 41.0)) < 1e-12
    True
    """
    return (N ** (1 - s) / (s - 1) - N ** -s / 2 + s * N ** (-s - 1) / 12 -
            s * (s + 1) * (s + 2) * N ** (-s - 3) / 720)


def n_tail(ns, terms, scale, target_rel_error, what='n-sum'):
    """The terms beyond the last on one side of the lattice.

    Args:
        ns (Sequence(float)): ``|n|``, ascending.
        terms (Sequence(complex)): The matching terms.
        scale (float): Size of the whole sum; tails far below it are
            dropped.

    Returns:
        tuple(complex, float): The tail and its error estimate.

    Raises:
        TailDivergence: If the terms decay like ``|n|^-s`` with
            ``Re s <= 1``.
    """
    ns = np.asarray(ns[-TAIL_TERMS:], dtype=float)
    terms = np.asarray(terms[-TAIL_TERMS:], dtype=complex)
    size = float(np.sum(np.abs(terms)))
    if size <= NEGLIGIBLE * target_rel_error * scale:
        return 0j, float(abs(terms[-1]))
    if np.any(terms == 0):
        return 0j, size
    c, s, residual = _fit_power(ns, terms)
    if s.real <= 1:
        raise TailDivergence('{}: terms decay like |n|^-{:.3g}, so the sum '
                             'diverges'.format(what, s.real))
    N = ns[-1]
    if residual > COHERENCE_TOL:
        # The phases do not follow a power law; keep only a bound.
        return 0j, abs(cmath.exp(c)) * float(special.zeta(s.real, N + 1))
    tail = cmath.exp(c) * power_tail(s, N)
    c4, s4, _ = _fit_power(ns[-4:], terms[-4:])
    return tail, abs(tail - cmath.exp(c4) * power_tail(s4, N))


# Sum-integrals
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

class MBEstimate(namedtuple('MBEstimate', [
        'value', 'abs_error_estimate', 'evaluations', 'converged',
        'tail_error', 'terms'])):

    """The value of a sum-integral.

    ``tail_error`` is the part of the error estimate due to the ``n``-tail
    extrapolation and ``terms`` maps each ``n`` of the outermost variable to
    its ``nu``-integral.
    """

    __slots__ = ()

    def scaled(self, factor):
        return self._replace(
            value=self.value * factor,
            abs_error_estimate=self.abs_error_estimate * abs(factor),
            tail_error=self.tail_error * abs(factor),
            terms={n: v * factor for n, v in self.terms.items()})

    def serializable(self):
        return {'value': self.value,
                'abs_error_estimate': self.abs_error_estimate,
                'evaluations': self.evaluations,
                'converged': self.converged,
                'tail_error': self.tail_error}


def _fsum(values):
    return complex(math.fsum(v.real for v in values),
                   math.fsum(v.imag for v in values))


def _richardson_gap(lattice, values, n_max, value):
    """Distance of ``value`` from the Richardson limit in ``1/K`` of the
    plain partial sums over ``|n| <= K/4, K/2, K``, with ``K`` the largest
    multiple of 4 up to ``n_max``."""
    K = 4 * (n_max // 4)
    if K == 0:
        return 0.0
    partial = [_fsum([v for n, v in zip(lattice, values) if abs(n) <= k])
               for k in (K // 4, K // 2, K)]
    return abs(richardson(partial) - value)


def _variable_sum(integrand, contour, depth, bound, target_rel_error):
    var = contour.variables[depth]
    what = 'evaluate_mb (`{}`)'.format(var.name)
    ladders = _ladder_factors(integrand.product, var.name, contour.names)
    omega = integrand.frequency(var.name)
    budget = contour.max_evaluations
    inner = []

    if depth + 1 < len(contour.variables):
        def f(n, t):
            t = np.asarray(t, dtype=float)
            values = np.empty(t.shape, dtype=complex)
            for k, tk in enumerate(t):
                point = dict(bound)
                point[var.name] = _point_binding(n, tk + 1j * var.offset)
                estimate = _variable_sum(integrand, contour, depth + 1, point,
                                         target_rel_error / 10)
                inner.append(estimate)
                values[k] = estimate.value
            return values
    else:
        def f(n, t):
            point = dict(bound)
            point[var.name] = grid_binding(
                n, np.asarray(t, dtype=float) + 1j * var.offset)
            return integrand.evaluate(point)

    def term(n, abs_floor):
        g = functools.partial(f, n)
        breaks = [first_pole(expr, var.name, n, integrand.values,
                             var.offset)[1].real for expr in ladders]
        core = integrate_interval(g, -var.cutoff, var.cutoff,
                                  target_rel_error / 10, abs_floor, budget,
                                  breakpoints=breaks, strict=False)
        upper = _nu_tail(g, var.cutoff, omega, target_rel_error / 10,
                         abs_floor, budget, what)
        lower = _nu_tail(lambda t: g(-np.asarray(t)), var.cutoff, -omega,
                         target_rel_error / 10, abs_floor, budget, what)
        return core + upper + lower

    lattice = var.lattice()
    center = min(range(len(lattice)), key=lambda k: (abs(lattice[k]), k))
    estimates = {center: term(lattice[center], DEFAULT_ABS_FLOOR)}
    abs_floor = 1e-3 * target_rel_error * max(abs(estimates[center].value),
                                              DEFAULT_ABS_FLOOR)
    for k, n in enumerate(lattice):
        if k not in estimates:
            estimates[k] = term(n, abs_floor)
    ordered = [estimates[k] for k in range(len(lattice))]
    values = [e.value for e in ordered]
    partial = _fsum(values)
    scale = max(abs(partial), DEFAULT_ABS_FLOOR)
    upward = [(n, v) for n, v in zip(lattice, values) if n > 0]
    downward = [(-n, v) for n, v in reversed(list(zip(lattice, values)))
                if n < 0]
    tails = [n_tail(*zip(*side), scale, target_rel_error, what)
             for side in (upward, downward)]
    value = partial + tails[0][0] + tails[1][0]
    tail_error = tails[0][1] + tails[1][1]
    if depth == 0 and len(contour.variables) > 1:
        # Richardson in n_max as a second check on the outer truncation.
        tail_error += _richardson_gap(lattice, values, var.n_max, value)
    error = math.fsum(e.abs_error_estimate for e in ordered) + tail_error
    tolerance = max(target_rel_error * abs(value),
                    abs_floor * len(lattice))
    converged = (all(e.converged for e in ordered) and
                 all(e.converged for e in inner) and error <= tolerance)
    evaluations = (sum(e.evaluations for e in ordered) +
                   sum(e.evaluations for e in inner))
    if depth == 0:
        log.debug('%s: partial sum %s, tails %s and %s', what, partial,
                  tails[0][0], tails[1][0])
    return MBEstimate(value, error, evaluations, converged, tail_error,
                      dict(zip(lattice, values)))


def evaluate_mb(integrand, contour):
    """``measure_constant * sum_n int dnu product`` over the contour.

    Several variables are done as iterated one-dimensional passes, the inner
    ones with a ten times tighter target. Without variables the product is
    evaluated directly.

    Args:
        integrand (MBIntegrand): The integrand.
        contour (ContourSpec): Its variables, cutoffs and target.

    Returns:
        MBEstimate: ``converged`` holds when the quadratures converged and
        the total error estimate, tails included, is within the target.

    Raises:
        PlanError: If a variable is missing from the integrand or enters
            with a coefficient other than ``+-i``.
        PoleOnContour: If a pole ladder starts on the wrong side of the
            contour.
        TailDivergence: If a fitted tail decays too slowly to converge.
    """
    constant = integrand.measure_constant.constant_value()
    if not contour.variables:
        return MBEstimate(integrand.evaluate({}) * constant, 0.0, 1, True,
                          0.0, {})
    integrand.check_variables(contour.names)
    check_contour(integrand, contour)
    start = time.perf_counter()
    estimate = _variable_sum(integrand, contour, 0, {},
                             contour.target_rel_error)
    estimate = estimate.scaled(constant)
    log.info('evaluate_mb: sum over %s = %s +- %.2e (tail %.2e, %d '
             'evaluations, %.1f s)', contour.names, estimate.value,
             estimate.abs_error_estimate, estimate.tail_error,
             estimate.evaluations, time.perf_counter() - start)
    return estimate


# Gustafson integral
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def _names(prefix, count):
    return ['{}{}'.format(prefix, k) for k in range(1, count + 1)]


def sklyanin_weight(us):
    """``1 / prod_{m<j} a(1 + i(u_j - u_m)) a(1 + i(u_m - u_j))``.

    Kept as the polynomial ``prod (-1)^[i(u_j - u_m)] [u_j - u_m]``, which
    stays finite where two variables meet.
    """
    product = AFactorProduct()
    for j, u in enumerate(us):
        for m in us[:j]:
            diff = _p(u) - _p(m)
            product = product * AFactorProduct(pairs=[(diff, 1)],
                                               sign_power=I * diff)
    return product


def gustafson_lhs(x, xp):
    """The left-hand side as an integrand over ``u1 .. u_(N-1)``.

    Returns:
        tuple(MBIntegrand, list(str)): The integrand and its variables.
    """
    N = len(x)
    xs, xps, us = _names('x', N), _names('xp', N), _names('u', N - 1)
    numerator = gustafson_integrand(xs, xps, us).numerator
    product = AFactorProduct(numerator=numerator) * sklyanin_weight(us)
    measure = AFactorProduct.constant(
        Fraction(1, math.factorial(N - 1) * 2 ** (N - 1)), pi_power=1 - N)
    values = dict(zip(xs, map(_point, x)))
    values.update(zip(xps, map(_point, xp)))
    return MBIntegrand(product, measure, values), us


def verify_gustafson(N, x, xp, contour=None, target=1e-4,
                     case_id='gustafson'):
    """Compare both sides of the complex Gustafson integral.

    ``x`` carries positive and ``xp`` negative offsets in ``nu``; a wrong
    sign puts a pole ladder on the wrong side of the real contour.

    Args:
        N (int): Number of external points on each side, 1 to 3.
        x (list): ``N`` SeparatedPoints (or ``(n, nu)`` pairs).
        xp (list): ``N`` SeparatedPoints.

    Keyword Args:
        contour (ContourSpec): Cutoffs for the ``N - 1`` variables, which
            are renamed ``u1 ..``. Defaults to ``n_max = 32`` and
            ``cutoff = 40`` with the report's target.

    Returns:
        Report
    """
    if not 1 <= N <= 3:
        raise PlanError('verify_gustafson: available for 1 <= N <= 3, got '
                        'N = {}'.format(N))
    if len(x) != N or len(xp) != N:
        raise ValueError('verify_gustafson: need {} points on each side, got '
                         '{} and {}'.format(N, len(x), len(xp)))
    start = time.perf_counter()
    integrand, us = gustafson_lhs(x, xp)
    if contour is None:
        contour = ContourSpec.over(us, target_rel_error=target)
    else:
        contour = contour.renamed(us)
    lhs = evaluate_mb(integrand, contour)
    rhs = gustafson_rhs(_names('x', N), _names('xp', N)).evaluate(
        integrand.values)
    error = lhs.abs_error_estimate / max(abs(rhs), 1e-300)
    details = {'N': N, 'tail_error': lhs.tail_error,
               'contour': contour.variables}
    return Report.compare(
        case_id, 'gustafson', ANCHORS['gustafson'], lhs.value, rhs, target,
        error_estimate=error, converged=lhs.converged,
        evaluations=lhs.evaluations,
        wall_ms=int(1000 * (time.perf_counter() - start)), details=details)


# Mellin-Barnes star-triangle and propagator
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

BETAS = ('b1', 'b2', 'b3')
LAMBDAS = ('l1', 'l2', 'l3')
HALF = Fraction(1, 2)


def mb_star_closed_form():
    """``2 pi prod a(1 - b_i) a(1/2 + b_i/2 - l_(i,i+1)) /
    a(1/2 - b_i/2 - l_(i,i+1))`` with ``l_i = mellin_index(l_i)``."""
    b = [_p(name) for name in BETAS]
    lam = [mellin_index(name) for name in LAMBDAS]
    product = AFactorProduct.constant(2, pi_power=1)
    for i in range(3):
        diff = lam[i] - lam[(i + 1) % 3]
        product = product * AFactorProduct(
            numerator=[1 - b[i], HALF + b[i] * HALF - diff],
            denominator=[HALF - b[i] * HALF - diff])
    return product


def mb_star_integrand():
    """``prod a(1 - b_i/2 - g + l_(i-1)) / a(b_i/2 - g + l_(i-1))``.

    The denominators are written as ``a((1 - b_i/2 + g - l_(i-1))_flipped)``
    so that the pole check sees their ladders.
    """
    b = [_p(name) for name in BETAS]
    lam = [mellin_index(name) for name in LAMBDAS]
    g = mellin_index('g')
    product = AFactorProduct()
    for i in range(3):
        half = b[i] * HALF
        product = product * AFactorProduct(numerator=[
            1 - half - g + lam[i - 1], (1 - half + g - lam[i - 1]).flip()])
    return product


def _star_values(betas, lambdas):
    betas = [_bi_index(b) for b in betas]
    lambdas = [_point(l) for l in lambdas]
    if len(betas) != 3 or len(lambdas) != 3:
        raise ValueError('invalid star-triangle: need three betas and three '
                         'lambdas')
    total = sum(b.alpha for b in betas)
    total_bar = sum(b.alpha_bar for b in betas)
    if abs(total - 1) > GAP_TOL or abs(total_bar - 1) > GAP_TOL:
        raise ConstraintError('invalid star-triangle: beta_1 + beta_2 + '
                              'beta_3 = ({}, {}) must equal 1'.format(
                                  total, total_bar))
    odd = [b for b in betas if b.n % 2]
    if odd:
        raise ConstraintError('invalid star-triangle: beta/2 needs an even '
                              'gap, got {}'.format(odd[0]))
    values = dict(zip(BETAS, betas))
    values.update(zip(LAMBDAS, lambdas))
    return values


def verify_mb_star_triangle(betas, lambdas, contour=None, target=1e-4,
                            case_id='mb_star'):
    """The Mellin-Barnes star-triangle relation at one parameter point.

    Args:
        betas (list): Three BiIndex values with even gaps summing to 1.
        lambdas (list): Three SeparatedPoints.

    Returns:
        Report: ``lhs`` is the closed product, ``rhs`` the sum-integral.

    Raises:
        ConstraintError: If the betas do not sum to 1 or have odd gaps.
    """
    values = _star_values(betas, lambdas)
    start = time.perf_counter()
    if contour is None:
        contour = ContourSpec.over(['g'], target_rel_error=target)
    else:
        contour = contour.renamed(['g'])
    closed = mb_star_closed_form().evaluate(values)
    rhs = evaluate_mb(MBIntegrand(mb_star_integrand(), values=values),
                      contour)
    error = rhs.abs_error_estimate / max(abs(rhs.value), 1e-300)
    return Report.compare(
        case_id, 'mb_star', ANCHORS['mb_star'], closed, rhs.value, target,
        error_estimate=error, converged=rhs.converged,
        evaluations=rhs.evaluations,
        wall_ms=int(1000 * (time.perf_counter() - start)),
        details={'tail_error': rhs.tail_error,
                 'contour': contour.variables})


def verify_star_coherence(betas, lambdas, contour=None, target=1e-4,
                          case_id='mb_star_coherence',
                          budget=DEFAULT_BUDGET):
    """The star-triangle relation in position space and in Mellin space.

    The position-space star with indices ``1 - b_i`` (at the default points)
    and the Mellin-Barnes star-triangle at the same betas are each reduced
    to the ratio of their two sides. The ratios must agree within the sum
    of the two error estimates, or within ``target`` when that is larger,
    and both relations must pass on their own.

    Returns:
        Report: ``lhs`` is the position-space ratio, ``rhs`` the Mellin one.
    """
    values = _star_values(betas, lambdas)
    start = time.perf_counter()
    mellin = verify_mb_star_triangle(betas, lambdas, contour=contour,
                                     target=target,
                                     case_id=case_id + ':mellin')
    position = verify_relation(
        'star', params=dict(zip(('alpha', 'beta', 'gamma'),
                                (1 - values[b] for b in BETAS))),
        target=target, case_id=case_id + ':position', budget=budget)
    error = position.error_estimate + mellin.error_estimate
    report = Report.compare(
        case_id, 'mb_star_coherence', ANCHORS['mb_star_coherence'],
        position.lhs / position.rhs, mellin.rhs / mellin.lhs,
        max(target, error), error_estimate=error,
        evaluations=position.evaluations + mellin.evaluations,
        wall_ms=int(1000 * (time.perf_counter() - start)),
        config={'target': target},
        details={'position_rel_dev': position.rel_dev,
                 'mellin_rel_dev': mellin.rel_dev,
                 'betas': [values[b] for b in BETAS]})
    log.info('%s: position %.2e, mellin %.2e, ratios differ by %.2e',
             case_id, position.rel_dev, mellin.rel_dev, report.rel_dev)
    return report._replace(
        passed=report.passed and position.passed and mellin.passed)


def mb_propagator_integrand(beta, z, w):
    """The Mellin-Barnes representation of ``[w - z]^(beta - 1)``.

    Summed over ``alpha = mellin_index(u)``; the denominator
    ``a(1/2 - b/2 - alpha)`` is written as ``a((1/2 + b/2 + alpha)_flipped)``.
    """
    b, alpha = _p('b'), mellin_index('alpha')
    half = b * HALF
    product = AFactorProduct(
        numerator=[1 - b, HALF + half - alpha, (HALF + half + alpha).flip()],
        extra_powers=[('z', -HALF + half - alpha), ('w', -HALF + half + alpha)])
    return MBIntegrand(product, AFactorProduct.constant(HALF, pi_power=-1),
                       {'b': _bi_index(beta)}, {'z': complex(z),
                                                'w': complex(w)})


def verify_mb_propagator(beta, z, w, contour=None, target=1e-4,
                         case_id='mb_propagator'):
    """``[w - z]^(beta - 1)`` against its Mellin-Barnes representation.

    For an odd gap of ``beta`` the sum runs over half-integer ``n``, so
    that ``[z]^(-1/2 + beta/2 - alpha)`` stays single valued. The
    ``nu``-integral converges through the oscillation of
    ``|w/z|^(2 i nu)``, so ``|w|`` and ``|z|`` must differ.

    Raises:
        SingularityError: If ``w = z``, where both sides are singular.
        PlanError: If ``|w| = |z|`` or ``Re(beta + beta_bar) <= 0``.
    """
    beta, z, w = _bi_index(beta), complex(z), complex(w)
    if w == z:
        raise SingularityError('verify_mb_propagator: both sides are '
                               'singular at w = z = {}'.format(z))
    if beta.total.real <= 0:
        raise PlanError('verify_mb_propagator: Re(beta + beta_bar) = {} must '
                        'be positive'.format(beta.total.real))
    if z == 0 or w == 0 or abs(math.log(abs(w) / abs(z))) < OSCILLATION_TOL:
        raise PlanError('verify_mb_propagator: need 0 < |z| != |w|, got '
                        '|z| = {} and |w| = {}'.format(abs(z), abs(w)))
    start = time.perf_counter()
    shift = Fraction(beta.n % 2, 2)
    if contour is None:
        contour = ContourSpec.over(['alpha'], lattice_shift=shift,
                                   target_rel_error=target)
    else:
        contour = contour._replace(variables=tuple(
            ContourVariable('alpha', v.n_max, v.cutoff, v.offset, shift)
            for v in contour.variables))
    lhs = power_bi(w - z, BiIndex(beta.alpha - 1, beta.alpha_bar - 1,
                                  n=beta.n))
    rhs = evaluate_mb(mb_propagator_integrand(beta, z, w), contour)
    error = rhs.abs_error_estimate / max(abs(lhs), 1e-300)
    return Report.compare(
        case_id, 'mb_propagator', ANCHORS['mb_propagator'], lhs, rhs.value,
        target, error_estimate=error, converged=rhs.converged,
        evaluations=rhs.evaluations,
        wall_ms=int(1000 * (time.perf_counter() - start)),
        details={'beta': beta, 'z': z, 'w': w,
                 'lattice_shift': shift, 'tail_error': rhs.tail_error})


# Mellin transform
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def mellin_transform(f, alpha, order=0, decay=8.0, target_rel_error=1e-8,
                     abs_floor=DEFAULT_ABS_FLOOR, budget=DEFAULT_BUDGET,
                     scale=2.0):
    """``(1/2 pi^2) int d^2z [z]^(-1/2 + alpha) f(z)``.

    Args:
        f (Callable): Vectorized ``f(z)`` with ``|f| ~ |z|^order`` at the
            origin and decaying faster than ``|z|^-decay``.
        alpha (BiIndex | SeparatedPoint): The Mellin index, or a separated
            point ``(n, nu)`` standing for ``mellin_index((n, nu))``.

    Returns:
        IntegralEstimate
    """
    if not isinstance(alpha, BiIndex):
        alpha = mellin_index(_point(alpha))
    weight = BiIndex(alpha.alpha - 0.5, alpha.alpha_bar - 0.5, n=alpha.n)
    sigma = 1.0 - alpha.total.real - order
    plan = QuadPlan([Singularity(0j, max(sigma, 0.0))],
                    decay_at_infinity=decay + 1.0 - alpha.total.real,
                    target_rel_error=target_rel_error, max_evaluations=budget,
                    abs_floor=abs_floor, scale=scale)
    estimate = integrate_plane(lambda z: power_bi(z, weight) * f(z), plan)
    return estimate.scaled(1 / (2 * math.pi ** 2))


def mellin_inverse(fhat, z, ns, cutoff=DEFAULT_CUTOFF, target_rel_error=1e-8,
                   budget=DEFAULT_BUDGET):
    """``sum_(n in ns) int dnu [z]^(-1/2 - alpha) fhat(n, nu)``.

    For transforms that decay exponentially in ``nu``, so that
    ``[-cutoff, cutoff]`` carries the whole integral.
    """
    z = complex(z)
    log_r, theta = math.log(abs(z)), cmath.phase(z)
    total = IntegralEstimate(0j, 0.0, 0, True)
    for n in ns:
        def g(nu, n=n):
            nu = np.asarray(nu, dtype=float)
            # [z]^(-1/2 - alpha) = |z|^(-1 - 2 i nu) exp(i n arg z)
            return (np.exp(-(1 + 2j * nu) * log_r + 1j * n * theta) *
                    fhat(n, nu))
        total = total + integrate_interval(g, -cutoff, cutoff,
                                           target_rel_error,
                                           max_evaluations=budget)
    return total


def gaussian_harmonic(k):
    """``f(z) = z^k exp(-|z|^2)`` and its Mellin transform.

    The transform vanishes unless ``n = k``, where it is
    ``Gamma(i nu + (k + 1)/2) / (2 pi)``.

    Returns:
        tuple(Callable, Callable): ``f(z)`` and ``fhat(n, nu)``.
    """
    k = int(k)
    if k < 0:
        raise ValueError('gaussian_harmonic: k = {} must be non-negative'
                         .format(k))

    def f(z):
        z = np.asarray(z, dtype=complex)
        return z ** k * np.exp(-np.abs(z) ** 2)

    def fhat(n, nu):
        nu = np.asarray(nu, dtype=float)
        if n != k:
            return np.zeros(nu.shape, dtype=complex)
        return np.exp(special.loggamma(1j * nu + (k + 1) / 2)) / (2 * math.pi)

    return f, fhat


def check_mellin_pair(k=1, nodes=((1, 0.3), (1, -0.7), (0, 0.2)),
                      z=0.7 + 0.4j, target=1e-6, case_id='mellin_pair',
                      budget=DEFAULT_BUDGET):
    """Round trip of the Mellin pair on ``z^k exp(-|z|^2)``.

    The transform is computed by plane quadrature at a few ``(n, nu)``
    nodes and compared with its closed form; the inverse of the closed form
    is compared with ``f(z)``. The report's deviation is the worse of the
    two, relative to ``|fhat(k, 0)|`` at the nodes.
    """
    start = time.perf_counter()
    f, fhat = gaussian_harmonic(k)
    reference = abs(complex(fhat(k, np.zeros(1))[0]))
    node_deviations, evaluations, converged = [], 0, True
    for n, nu in nodes:
        estimate = mellin_transform(f, (n, nu), order=k,
                                    target_rel_error=target / 10,
                                    abs_floor=1e-2 * target * reference,
                                    budget=budget)
        closed = complex(fhat(n, np.array([nu]))[0])
        node_deviations.append(abs(estimate.value - closed) / reference)
        evaluations += estimate.evaluations
        converged = converged and estimate.converged
    inverse = mellin_inverse(fhat, z, [k], target_rel_error=target / 10,
                             budget=budget)
    exact = complex(f(np.array([z]))[0])
    deviation = max([rel_dev(inverse.value, exact)] + node_deviations)
    converged = converged and inverse.converged
    return Report(case_id, 'mellin_pair', ANCHORS['mellin_pair'],
                  inverse.value, exact, deviation,
                  inverse.abs_error_estimate / abs(exact),
                  converged and deviation <= target,
                  evaluations=evaluations + inverse.evaluations,
                  wall_ms=int(1000 * (time.perf_counter() - start)),
                  config={'target': target},
                  details={'k': k, 'nodes': [list(n) for n in nodes],
                           'node_deviations': node_deviations})


def verify_completeness_resolution(x, xp, width=1.0, target=1e-3,
                                   case_id='mellin_orthogonality',
                                   budget=DEFAULT_BUDGET):
    """``int d^2z [z]^(-1 + i(x - x'))`` smeared in ``nu - nu'``.

    A Gaussian window of the given width in ``nu`` (Kronecker in ``n``)
    turns ``2 pi^2 delta(alpha)`` into ``2 pi^2 delta_(n n') W(nu - nu')``.
    The deviation is taken relative to the peak ``2 pi^2 W(0)``.
    """
    start = time.perf_counter()
    cfg = ChainConfig(1, Spin(0, 0.0))
    element = smeared_orthogonality(cfg, _point(x), _point(xp), width,
                                    target / 10, budget)
    peak = 2 * math.pi ** 2 * smeared_window(0.0, width)
    deviation = abs(element.numeric - element.closed) / peak
    error = element.error_estimate * max(abs(element.closed), 1e-300) / peak
    return Report(case_id, 'mellin_orthogonality',
                  ANCHORS['mellin_orthogonality'], element.numeric,
                  element.closed, deviation, error,
                  element.converged and deviation <= target,
                  evaluations=element.evaluations,
                  wall_ms=int(1000 * (time.perf_counter() - start)),
                  config={'target': target},
                  details={'width': width, 'peak': peak})
