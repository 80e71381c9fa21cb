#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# symalg.py

"""
Exact algebra of a-factor products with affine bi-index arguments.

An argument such as ``1 + i(x_k - u_j)`` is an :class:`AffineExpr`: one
exact linear form for the holomorphic slot and one for the antiholomorphic
slot. A parameter ``P`` enters a form through its two slot symbols, written
``P`` and ``bar(P)``. Products of a-factors, shift-rule pair factors
``[alpha]^{+-1} = (alpha alpha_bar)^{+-1}``, signs ``(-1)^[E]``, phases
``i^[E]`` (with ``[E] = E - E_bar``), rational scalars, powers of pi and
powers ``[b]^E`` of external bases are collected in an
:class:`AFactorProduct`, which can be evaluated numerically or brought to a
normal form with :func:`canonicalize`.
"""

import math
from collections import Counter, namedtuple
from fractions import Fraction
from numbers import Number

import numpy as np

from . import constants
from .exceptions import PoleError
from .specfun import (BiIndex, SeparatedPoint, Spin, a_product, a_values,
                      power_bi)
from .utils import i_power, minus_one_power

HOLO, ANTI = 'h', 'a'


def _fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


class QComplex(namedtuple('QComplex', ['re', 'im'])):

    """An exact complex rational ``re + i im``.

    >>> QComplex(1, 2) * QComplex(0, 1)
    QComplex(re=Fraction(-2, 1), im=Fraction(1, 1))
    """

    __slots__ = ()

    def __new__(cls, re=0, im=0):
        return super().__new__(cls, _fraction(re), _fraction(im))

    @classmethod
    def coerce(cls, value):
        if isinstance(value, QComplex):
            return value
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        return cls(value)

    def is_zero(self):
        return self.re == 0 and self.im == 0

    def is_integer(self):
        return self.im == 0 and self.re.denominator == 1

    def __add__(self, other):
        if not isinstance(other, (QComplex, Number)):
            return NotImplemented
        other = QComplex.coerce(other)
        return QComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QComplex(-self.re, -self.im)

    def __sub__(self, other):
        if not isinstance(other, (QComplex, Number)):
            return NotImplemented
        return self + (-QComplex.coerce(other))

    def __rsub__(self, other):
        return QComplex.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (QComplex, Number)):
            return NotImplemented
        other = QComplex.coerce(other)
        return QComplex(self.re * other.re - self.im * other.im,
                        self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QComplex.coerce(other)
        norm = other.re ** 2 + other.im ** 2
        if norm == 0:
            raise ZeroDivisionError('QComplex division by zero')
        return self * QComplex(other.re / norm, -other.im / norm)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return '{}i'.format(self.im)
        return '({}{}{}i)'.format(self.re, '+' if self.im > 0 else '-',
                                  abs(self.im))

    def serializable(self):
        return [self.re, self.im]


I = QComplex(0, 1)
ZERO_Q = QComplex(0)


class LinearForm(namedtuple('LinearForm', ['const', 'terms'])):

    """``const + sum(coef * symbol)`` with exact coefficients.

    ``terms`` is a sorted tuple of ``((name, slot), coef)`` with no zero
    coefficients, so equal forms compare equal.
    """

    __slots__ = ()

    def __new__(cls, const=0, terms=()):
        items = terms.items() if isinstance(terms, dict) else terms
        merged = {}
        for key, coef in items:
            merged[key] = merged.get(key, ZERO_Q) + QComplex.coerce(coef)
        cleaned = tuple(sorted((key, coef) for key, coef in merged.items()
                               if not coef.is_zero()))
        return super().__new__(cls, QComplex.coerce(const), cleaned)

    def coefficient(self, name, slot):
        for key, coef in self.terms:
            if key == (name, slot):
                return coef
        return ZERO_Q

    def params(self):
        return {name for (name, _), _ in self.terms}

    def __add__(self, other):
        if not isinstance(other, LinearForm):
            return LinearForm(self.const + other, self.terms)
        return LinearForm(self.const + other.const,
                          self.terms + other.terms)

    __radd__ = __add__

    def scale(self, factor):
        factor = QComplex.coerce(factor)
        return LinearForm(self.const * factor,
                          [(key, coef * factor) for key, coef in self.terms])

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other if isinstance(other, LinearForm)
                       else -QComplex.coerce(other))

    def evaluate(self, bindings):
        value = complex(self.const)
        for (name, slot), coef in self.terms:
            try:
                binding = bindings[name]
            except KeyError:
                raise ValueError('unbound parameter `{}`'.format(name))
            value = value + complex(coef) * (binding.holo if slot == HOLO
                                             else binding.anti)
        return value

    def key(self):
        return (tuple((key, coef.re, coef.im) for key, coef in self.terms),
                self.const.re, self.const.im)

    def __str__(self):
        parts = []
        for (name, slot), coef in self.terms:
            symbol = name if slot == HOLO else 'bar({})'.format(name)
            if coef == QComplex(1):
                parts.append('+ ' + symbol)
            elif coef == QComplex(-1):
                parts.append('- ' + symbol)
            elif coef == I:
                parts.append('+ i*' + symbol)
            elif coef == -I:
                parts.append('- i*' + symbol)
            else:
                parts.append('+ {}*{}'.format(coef, symbol))
        if not self.const.is_zero() or not parts:
            parts.insert(0, str(self.const))
        text = ' '.join(parts)
        return text[2:] if text.startswith('+ ') else text

    def serializable(self):
        return {'const': self.const,
                'terms': [[name, slot, coef]
                          for (name, slot), coef in self.terms]}


class AffineExpr(namedtuple('AffineExpr', ['holo', 'anti'])):

    """A symbolic bi-index ``(holo | anti)``.

    Examples:
        >>> x = AffineExpr.param('x')
        >>> print(1 + I * x)
        (1 + i*x | 1 + i*bar(x))
        >>> print((1 + I * x).flip())
        (1 + i*bar(x) | 1 + i*x)
    """

    __slots__ = ()

    def __new__(cls, holo=None, anti=None):
        holo = LinearForm() if holo is None else holo
        anti = LinearForm() if anti is None else anti
        return super().__new__(cls, holo, anti)

    @classmethod
    def constant(cls, value, value_bar=None):
        value_bar = value if value_bar is None else value_bar
        return cls(LinearForm(value), LinearForm(value_bar))

    @classmethod
    def integer(cls, k):
        """The constant bi-index ``(k | 0)``, whose gap is ``k``."""
        return cls(LinearForm(k), LinearForm(0))

    @classmethod
    def param(cls, name):
        return cls(LinearForm(0, [((name, HOLO), 1)]),
                   LinearForm(0, [((name, ANTI), 1)]))

    def flip(self):
        return AffineExpr(self.anti, self.holo)

    def params(self):
        return self.holo.params() | self.anti.params()

    def is_zero(self):
        return self == ZERO

    def __add__(self, other):
        if isinstance(other, AffineExpr):
            return AffineExpr(self.holo + other.holo, self.anti + other.anti)
        other = QComplex.coerce(other)
        return AffineExpr(self.holo + other, self.anti + other)

    __radd__ = __add__

    def __neg__(self):
        return AffineExpr(-self.holo, -self.anti)

    def __sub__(self, other):
        return self + (-other if isinstance(other, AffineExpr)
                       else -QComplex.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, factor):
        if isinstance(factor, AffineExpr):
            return NotImplemented
        return AffineExpr(self.holo.scale(factor), self.anti.scale(factor))

    __rmul__ = __mul__

    def gap_form(self):
        """``(const, {name: k})`` with ``[E] = const + sum(k * gap(P) / 2)``.

        ``None`` if some parameter enters with a nonzero mean coefficient,
        in which case the gap depends on more than the parameter gaps.
        """
        const = self.holo.const - self.anti.const
        coeffs = {}
        for name in sorted(self.params()):
            u = self.holo.coefficient(name, HOLO)
            v = self.holo.coefficient(name, ANTI)
            u_bar = self.anti.coefficient(name, HOLO)
            v_bar = self.anti.coefficient(name, ANTI)
            if not (u + v - u_bar - v_bar).is_zero():
                return None
            k = u - v - u_bar + v_bar
            if not k.is_zero():
                coeffs[name] = k
        return const, coeffs

    def values(self, bindings):
        """Numeric ``(holo, anti)`` at the given bindings."""
        return self.holo.evaluate(bindings), self.anti.evaluate(bindings)

    def gap(self, bindings):
        """The integer ``holo - anti``, exact from the parameter gaps.

        Returns an ``int`` for scalar bindings and an integer array when a
        binding holds arrays.

        Raises:
            ValueError: If the gap is not an integer.
        """
        form = self.gap_form()
        if form is None:
            holo, anti = self.values(bindings)
            return _as_integer(holo - anti, self)
        const, coeffs = form
        exact, numeric = const, 0
        for name, k in coeffs.items():
            try:
                binding = bindings[name]
            except KeyError:
                raise ValueError('unbound parameter `{}`'.format(name))
            if isinstance(binding.gap, QComplex):
                exact = exact + k * binding.gap / 2
            else:
                numeric = numeric + complex(k) * binding.gap / 2
        if isinstance(numeric, int):
            if not exact.is_integer():
                raise ValueError('{} does not evaluate to a bi-index: gap '
                                 '{}'.format(self, exact))
            return int(exact.re)
        return _as_integer(numeric + complex(exact), self)

    def evaluate(self, bindings):
        """The :class:`~pysl2c.specfun.BiIndex` at scalar bindings."""
        holo, anti = self.values(bindings)
        return BiIndex(holo, anti, n=self.gap(bindings))

    def key(self):
        return (self.holo.key(), self.anti.key())

    def __str__(self):
        return '({} | {})'.format(self.holo, self.anti)

    def serializable(self):
        return {'holo': self.holo.serializable(),
                'anti': self.anti.serializable()}


ZERO = AffineExpr()


def _qcomplex_from(value):
    """Read a QComplex from its serialized ``[re, im]`` form, where each part
    is a number, a ``'p/q'`` string or a ``[num, den]`` pair."""
    def part(x):
        if isinstance(x, (list, tuple)):
            return Fraction(*x)
        return Fraction(x) if isinstance(x, str) else _fraction(x)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return QComplex(part(value[0]), part(value[1]))
    return QComplex.coerce(part(value) if isinstance(value, str) else value)


def _linear_form_from(d):
    return LinearForm(_qcomplex_from(d.get('const', 0)),
                      [((name, slot), _qcomplex_from(coef))
                       for name, slot, coef in d.get('terms', [])])


def as_expr(value):
    """Coerce a BiIndex, number, exact rational or serialized form to an
    :class:`AffineExpr`.

    A BiIndex keeps its exact integer gap.

    >>> as_expr(BiIndex(0.8, -0.2)).gap({})
    1
    """
    if isinstance(value, AffineExpr):
        return value
    if isinstance(value, BiIndex):
        holo = LinearForm(value.alpha)
        return AffineExpr(holo, holo - value.n)
    if isinstance(value, dict):
        if 'holo' in value:
            return AffineExpr(_linear_form_from(value['holo']),
                              _linear_form_from(value['anti']))
        alpha = _qcomplex_from(value['alpha'])
        alpha_bar = _qcomplex_from(value.get('alpha_bar', value['alpha']))
        return AffineExpr(LinearForm(alpha), LinearForm(alpha_bar))
    if isinstance(value, str):
        return AffineExpr.constant(_qcomplex_from(value))
    if isinstance(value, (list, tuple)):
        return AffineExpr(LinearForm(_qcomplex_from(value[0])),
                          LinearForm(_qcomplex_from(value[1])))
    return AffineExpr.constant(value)


def _as_integer(value, expr, tol=constants.GAP_TOL):
    array = np.asarray(value, dtype=complex)
    rounded = np.round(array.real)
    if np.any(np.abs(array - rounded) > tol * np.maximum(1, np.abs(array))):
        raise ValueError('{} does not evaluate to a bi-index: gap {}'.format(
            expr, value))
    if array.ndim == 0:
        return int(rounded)
    return rounded.astype(int)


class Binding(namedtuple('Binding', ['holo', 'anti', 'gap'])):

    """Numeric values of one parameter's two slots and its exact gap.

    ``gap`` is a :class:`QComplex` for scalar values; for array values it is
    a complex array (``-i n`` for a separated variable on a grid).
    """

    __slots__ = ()


def binding_for(value):
    """Bind a SeparatedPoint, Spin, BiIndex or number to a parameter.

    >>> binding_for(SeparatedPoint(2, 0.1)).gap
    QComplex(re=Fraction(0, 1), im=Fraction(-2, 1))
    """
    if isinstance(value, Binding):
        return value
    if isinstance(value, SeparatedPoint):
        return Binding(value.x, value.x_bar, QComplex(0, -value.n))
    if isinstance(value, Spin):
        return Binding(value.s, value.s_bar, QComplex(value.n_s))
    if isinstance(value, BiIndex):
        return Binding(value.alpha, value.alpha_bar, QComplex(value.n))
    if isinstance(value, Number):
        return Binding(complex(value), complex(value), ZERO_Q)
    raise TypeError('cannot bind {!r} to a parameter'.format(value))


def grid_binding(n, nu):
    """Bind a separated variable to arrays of ``n`` and ``nu`` values.

    ``n`` may lie on a shifted lattice (e.g. half-integers).
    """
    n = np.asarray(n, dtype=float)
    nu = np.asarray(nu, dtype=complex)
    return Binding(-0.5j * n + nu, 0.5j * n + nu, -1j * n)


def bind(values):
    return {name: binding_for(value) for name, value in values.items()}


def _is_array(bindings):
    return any(np.ndim(b.holo) > 0 for b in bindings.values())


class AFactorProduct(namedtuple('AFactorProduct', [
        'numerator', 'denominator', 'pairs', 'sign_power', 'phase_power',
        'scalar', 'pi_power', 'extra_powers'])):

    """A product of a-factors and elementary factors.

    The value is::

        scalar * pi^pi_power * (-1)^[sign_power] * i^[phase_power]
            * prod(a(E) for E in numerator) / prod(a(E) for E in denominator)
            * prod([E]^power for E, power in pairs)
            * prod([base]^E for base, E in extra_powers)

    where ``[E]^k = (E E_bar)^k`` for a pair factor and ``[b]^E`` is the
    single-valued power of an external complex base.
    """

    __slots__ = ()

    def __new__(cls, numerator=(), denominator=(), pairs=(),
                sign_power=None, phase_power=None, scalar=1, pi_power=0,
                extra_powers=()):
        return super().__new__(
            cls, tuple(numerator), tuple(denominator),
            tuple((expr, int(power)) for expr, power in pairs),
            ZERO if sign_power is None else sign_power,
            ZERO if phase_power is None else phase_power,
            _fraction(scalar), int(pi_power), tuple(extra_powers))

    @classmethod
    def a(cls, expr):
        return cls(numerator=[expr])

    @classmethod
    def constant(cls, scalar=1, pi_power=0):
        return cls(scalar=scalar, pi_power=pi_power)

    def __mul__(self, other):
        if not isinstance(other, AFactorProduct):
            return self._replace(scalar=self.scalar * _fraction(other))
        return AFactorProduct(
            self.numerator + other.numerator,
            self.denominator + other.denominator,
            self.pairs + other.pairs,
            self.sign_power + other.sign_power,
            self.phase_power + other.phase_power,
            self.scalar * other.scalar,
            self.pi_power + other.pi_power,
            self.extra_powers + other.extra_powers)

    __rmul__ = __mul__

    def inverse(self):
        return AFactorProduct(
            self.denominator, self.numerator,
            [(expr, -power) for expr, power in self.pairs],
            -self.sign_power, -self.phase_power, 1 / self.scalar,
            -self.pi_power,
            [(tag, -expr) for tag, expr in self.extra_powers])

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, k):
        result = AFactorProduct()
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            result = result * base
        return result

    def params(self):
        exprs = (list(self.numerator) + list(self.denominator) +
                 [expr for expr, _ in self.pairs] +
                 [self.sign_power, self.phase_power] +
                 [expr for _, expr in self.extra_powers])
        return set().union(*(expr.params() for expr in exprs))

    def tags(self):
        return {tag for tag, _ in self.extra_powers}

    def constant_value(self):
        return float(self.scalar) * math.pi ** self.pi_power

    def evaluate(self, values, bases=None):
        """Numeric value at a parameter assignment.

        Args:
            values (dict): Maps parameter names to SeparatedPoint, Spin,
                BiIndex, numbers or :class:`Binding` (array bindings give an
                array result).

        Keyword Args:
            bases (dict): Maps extra-power tags to complex bases.

        Raises:
            PoleError: If a factor is singular.
        """
        bindings = bind(values)
        bases = bases or {}
        if _is_array(bindings):
            return self._evaluate_array(bindings, bases)
        value = a_product(e.evaluate(bindings) for e in self.numerator)
        if value != 0 and self.denominator:
            try:
                below = a_product(e.evaluate(bindings)
                                  for e in self.denominator)
            except PoleError:
                return 0j
            if below == 0:
                raise PoleError('denominator a-factor vanishes at {}'.format(
                    values))
            value /= below
        for expr, power in self.pairs:
            holo, anti = expr.values(bindings)
            pair = holo * anti
            if pair == 0 and power < 0:
                raise PoleError('pair factor {} vanishes'.format(expr))
            value *= pair ** power
        value *= minus_one_power(self.sign_power.gap(bindings))
        value *= i_power(self.phase_power.gap(bindings))
        for tag, expr in self.extra_powers:
            value *= power_bi(_base(bases, tag), expr.evaluate(bindings))
        return complex(value * self.constant_value())

    def _evaluate_array(self, bindings, bases):
        value = np.ones(1, dtype=complex)
        for expr in self.numerator:
            value = value * a_values(*expr.values(bindings))
        for expr in self.denominator:
            below = a_values(*expr.values(bindings))
            if np.any(below == 0):
                raise PoleError('denominator a-factor {} vanishes'.format(
                    expr))
            value = value / below
        for expr, power in self.pairs:
            holo, anti = expr.values(bindings)
            pair = np.asarray(holo * anti)
            if power < 0 and np.any(pair == 0):
                raise PoleError('pair factor {} vanishes'.format(expr))
            value = value * pair ** power
        sign = np.asarray(self.sign_power.gap(bindings)) % 2
        value = value * np.where(sign == 1, -1.0, 1.0)
        phase = np.asarray(self.phase_power.gap(bindings)) % 4
        value = value * np.asarray(constants.I_POWERS)[phase]
        for tag, expr in self.extra_powers:
            z = complex(_base(bases, tag))
            holo, anti = expr.values(bindings)
            gap = expr.gap(bindings)
            if z == 0:
                raise PoleError('extra power of zero base `{}`'.format(tag))
            value = value * (np.exp((holo + anti) * math.log(abs(z))) *
                             (z / abs(z)) ** gap)
        return value * self.constant_value()

    def __str__(self):
        parts = ['{}'.format(self.scalar)]
        if self.pi_power:
            parts.append('pi^{}'.format(self.pi_power))
        if not self.sign_power.is_zero():
            parts.append('(-1)^[{}]'.format(self.sign_power))
        if not self.phase_power.is_zero():
            parts.append('i^[{}]'.format(self.phase_power))
        parts += ['a{}'.format(e) for e in self.numerator]
        parts += ['a{}^-1'.format(e) for e in self.denominator]
        parts += ['[{}]^{}'.format(e, k) for e, k in self.pairs]
        parts += ['[{}]^{}'.format(tag, e) for tag, e in self.extra_powers]
        return ' * '.join(parts)

    def serializable(self):
        return {
            'numerator': [e.serializable() for e in self.numerator],
            'denominator': [e.serializable() for e in self.denominator],
            'pairs': [{'expr': e.serializable(), 'power': k}
                      for e, k in self.pairs],
            'sign_power': self.sign_power.serializable(),
            'phase_power': self.phase_power.serializable(),
            'scalar': self.scalar,
            'pi_power': self.pi_power,
            'extra_powers': [{'base': tag, 'exponent': e.serializable()}
                             for tag, e in self.extra_powers],
        }

    @classmethod
    def from_dict(cls, d):
        """Inverse of :meth:`serializable` (after a JSON round trip)."""
        scalar = d.get('scalar', 1)
        if isinstance(scalar, (list, tuple)):
            scalar = Fraction(*scalar)
        optional = {key: as_expr(d[key]) for key in ('sign_power',
                                                     'phase_power')
                    if key in d}
        return cls(
            numerator=[as_expr(e) for e in d.get('numerator', [])],
            denominator=[as_expr(e) for e in d.get('denominator', [])],
            pairs=[(as_expr(p['expr']), p['power'])
                   for p in d.get('pairs', [])],
            scalar=scalar,
            pi_power=d.get('pi_power', 0),
            extra_powers=[(e['base'], as_expr(e['exponent']))
                          for e in d.get('extra_powers', [])],
            **optional)


def _base(bases, tag):
    try:
        return bases[tag]
    except KeyError:
        raise ValueError('no value given for base `{}`'.format(tag))


# Canonicalization
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def _canonical_a(expr):
    """Normal form of a single factor ``a(expr)``.

    Returns ``(base, sign, pairs)`` with
    ``a(expr) = (-1)^[sign] * prod([f]^k for f, k in pairs) * a(base)``,
    where ``base`` has the holomorphic constant in ``[0, 1)`` and the
    orientation with the smaller key.
    """
    best = None
    for flipped in (False, True):
        e = expr.flip() if flipped else expr
        sign = expr if flipped else ZERO
        shift = math.floor(e.holo.const.re)
        base = e - shift
        pairs = []
        if shift > 0:
            # a(f + k) = (-1)^k a(f) / prod_{j<k} [f + j]
            pairs = [(base + j, -1) for j in range(shift)]
        elif shift < 0:
            # a(f - m) = (-1)^m prod_{j=1..m} [f - j] a(f)
            pairs = [(base - j, 1) for j in range(1, -shift + 1)]
        sign = sign + AffineExpr.integer(abs(shift) % 2)
        candidate = (base.key(), base, sign, pairs)
        if best is None or candidate[0] < best[0]:
            best = candidate
    return best[1], best[2], best[3]


def _canonical_pair(expr):
    """``[f] = [-f] = [f_bar] = [-f_bar]``; pick the smallest key."""
    return min((expr, -expr, expr.flip(), -expr.flip()),
               key=AffineExpr.key)


def _reduce_coefficient(k, period):
    if k.re.denominator == 1 and k.im.denominator == 1:
        return QComplex(k.re % period, k.im % period)
    return k


def _reduce_exponent(expr, modulus):
    """Rewrite a sign or phase exponent in gap form, reduced mod ``modulus``.

    Parameters are assumed to have integer gaps, so a coefficient ``k`` only
    matters modulo ``2 * modulus``. Exponents with the same value for every
    such assignment then compare equal.
    """
    form = expr.gap_form()
    if form is None:
        return expr
    const, coeffs = form
    if const.is_integer():
        const = QComplex(const.re % modulus)
    coeffs = {name: _reduce_coefficient(k, 2 * modulus)
              for name, k in coeffs.items()}
    holo = LinearForm(const, [((name, HOLO), k / 2)
                              for name, k in coeffs.items()])
    anti = LinearForm(0, [((name, ANTI), k / 2)
                          for name, k in coeffs.items()])
    return AffineExpr(holo, anti)


class _Collector:

    """Mutable accumulator used while canonicalizing one product."""

    def __init__(self, product):
        self.sign = product.sign_power
        self.pairs = {}
        self.exprs = {}
        self.numerator = Counter()
        self.denominator = Counter()
        for expr, power in product.pairs:
            self.add_pair(expr, power)

    def add_pair(self, expr, power):
        expr = _canonical_pair(expr)
        key = expr.key()
        self.exprs[key] = expr
        self.pairs[key] = self.pairs.get(key, 0) + power

    def add_factor(self, expr, counter, pair_sign):
        base, sign, pairs = _canonical_a(expr)
        key = base.key()
        self.exprs[key] = base
        counter[key] += 1
        self.sign = self.sign + sign
        for pair, power in pairs:
            self.add_pair(pair, pair_sign * power)

    def cancel_quotient(self):
        for key in list(self.numerator):
            common = min(self.numerator[key], self.denominator[key])
            if common:
                self.numerator[key] -= common
                self.denominator[key] -= common

    def collapse_reflections(self, counter, pair_sign):
        """Remove ``a(K) a(1 - K_bar) = 1`` pairs from one side."""
        for key in sorted(counter):
            while counter[key] > 0:
                partner = 1 - self.exprs[key].flip()
                base, sign, pairs = _canonical_a(partner)
                other = base.key()
                self.exprs.setdefault(other, base)
                needed = 2 if other == key else 1
                if counter[other] < needed:
                    break
                counter[key] -= 1
                counter[other] -= 1
                # a(K) a(base) = (-1)^[sign] / prod(pairs)
                self.sign = self.sign + sign
                for pair, power in pairs:
                    self.add_pair(pair, -pair_sign * power)

    def factors(self, counter):
        return [self.exprs[key] for key in sorted(counter)
                for _ in range(counter[key])]


def canonicalize(product):
    """Bring a product to its normal form.

    Every a-factor is flipped and shifted into the strip
    ``0 <= Re(holomorphic constant) < 1`` (shift rule and conjugate flip),
    equal factors cancel between numerator and denominator, reflection pairs
    ``a(K) a(1 - K_bar)`` collapse to 1, pair factors and extra powers merge,
    and sign and phase exponents are reduced mod 2 and mod 4. The value is
    unchanged and ``canonicalize`` is idempotent.
    """
    c = _Collector(product)
    for expr in product.numerator:
        c.add_factor(expr, c.numerator, 1)
    for expr in product.denominator:
        c.add_factor(expr, c.denominator, -1)
    c.cancel_quotient()
    c.collapse_reflections(c.numerator, 1)
    c.collapse_reflections(c.denominator, -1)
    pairs = [(c.exprs[key], power) for key, power in sorted(c.pairs.items())
             if power]
    extras = {}
    for tag, expr in product.extra_powers:
        extras[tag] = extras.get(tag, ZERO) + expr
    return AFactorProduct(
        c.factors(c.numerator),
        c.factors(c.denominator),
        pairs,
        _reduce_exponent(c.sign, 2),
        _reduce_exponent(product.phase_power, 4),
        product.scalar,
        product.pi_power,
        sorted((tag, expr) for tag, expr in extras.items()
               if not expr.is_zero()))


# Builders
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def _p(name):
    return AffineExpr.param(name)


def _total(names):
    return sum((_p(name) for name in names), ZERO)


def mellin_index(point):
    """The bi-index ``(i x_bar, i x) = (i nu - n/2, i nu + n/2)``.

    Symbolic for a parameter name, numeric for a SeparatedPoint.

    >>> mellin_index(SeparatedPoint(1, 0.0)).n
    -1
    """
    if isinstance(point, SeparatedPoint):
        return BiIndex(1j * point.x_bar, 1j * point.x, n=-point.n)
    return (I * _p(point)).flip()


def q_factor(x='x', xp='xp', s='s'):
    """``q(x, x') = pi a(1 + i(x - x')) a(s_bar - i x_bar) / a(s - i x')``.

    Arguments are parameter names; bind them to SeparatedPoint and Spin
    values to evaluate.
    """
    return AFactorProduct(
        numerator=[1 + I * (_p(x) - _p(xp)), (_p(s) - I * _p(x)).flip()],
        denominator=[_p(s) - I * _p(xp)],
        pi_power=1)


def txx_closed_form(xs, xps, s='s', base='z0'):
    """Matrix element of the shift operator between A-system states.

    ``(-1)^[A_X] [z0]^{i(X - X')} prod_{k,j} q(x_k, x'_j)`` with
    ``A_X = sum_k (s - i x_k)``.
    """
    if len(xs) != len(xps) or not xs:
        raise ValueError('txx_closed_form: need two nonempty lists of equal '
                         'length, got {} and {}'.format(len(xs), len(xps)))
    a_x = len(xs) * _p(s) - I * _total(xs)
    product = AFactorProduct(
        sign_power=a_x,
        extra_powers=[(base, I * (_total(xs) - _total(xps)))])
    for x in xs:
        for xp in xps:
            product = product * q_factor(x, xp, s)
    return product


def ba_closed_form(us, xs, s='s', base='p'):
    """Scalar product of a B-system state with an A-system state.

    ``i^[A_X] pi^N |p|^{-N-1} [p]^{A_X} prod_k a(s_bar - i x_bar_k)
    prod_{k,j} q(x_k, u_j)`` with ``len(us) = N - 1``. The modulus power is
    folded into the ``[p]`` exponent.
    """
    N = len(xs)
    if N < 1 or len(us) != N - 1:
        raise ValueError('ba_closed_form: need N >= 1 x-parameters and N - 1 '
                         'u-parameters, got {} and {}'.format(N, len(us)))
    a_x = N * _p(s) - I * _total(xs)
    product = AFactorProduct(
        numerator=[(_p(s) - I * _p(x)).flip() for x in xs],
        phase_power=a_x,
        pi_power=N,
        extra_powers=[(base, a_x - Fraction(N + 1, 2))])
    for x in xs:
        for u in us:
            product = product * q_factor(x, u, s)
    return product


def gustafson_rhs(xs, xps):
    """``prod_{k,j} a(1 + i(x_k - x'_j)) / a(1 + i(X - X'))``."""
    return AFactorProduct(
        numerator=[1 + I * (_p(x) - _p(xp)) for x in xs for xp in xps],
        denominator=[1 + I * (_total(xs) - _total(xps))])


def gustafson_integrand(xs, xps, us):
    """The a-factors under the complex Gustafson sum-integral.

    ``prod_{k,j} a(1 + i(x_k - u_j)) a(1 + i(u_j - x'_k))`` over
    ``prod_{m<j} a(1 + i(u_j - u_m)) a(1 + i(u_m - u_j))``.
    """
    numerator = []
    for x, xp in zip(xs, xps):
        for u in us:
            numerator.append(1 + I * (_p(x) - _p(u)))
            numerator.append(1 + I * (_p(u) - _p(xp)))
    denominator = []
    for j, u in enumerate(us):
        for m in us[:j]:
            denominator.append(1 + I * (_p(u) - _p(m)))
            denominator.append(1 + I * (_p(m) - _p(u)))
    return AFactorProduct(numerator=numerator, denominator=denominator)


def _difference_pairs(xs):
    return [(_p(xk) - _p(xj), 1)
            for k, xk in enumerate(xs) for xj in xs[k + 1:]]


def measure_a_product(xs):
    """``1/N! pi^{-N^2} (2 pi)^{-N} prod_{k<j} [x_k - x_j]``."""
    N = len(xs)
    return AFactorProduct(
        pairs=_difference_pairs(xs),
        scalar=Fraction(1, math.factorial(N) * 2 ** N),
        pi_power=-N * N - N)


def measure_b_product(xs, N=None):
    """``1/(N-1)! 2 pi^{-N^2} (2 pi)^{-N} prod_{k<j} [x_k - x_j]``.

    The B-system has ``N - 1`` separated variables.
    """
    N = len(xs) + 1 if N is None else N
    if len(xs) != N - 1:
        raise ValueError('measure_b_product: expected {} variables, got '
                         '{}'.format(N - 1, len(xs)))
    return AFactorProduct(
        pairs=_difference_pairs(xs),
        scalar=Fraction(2, math.factorial(N - 1) * 2 ** N),
        pi_power=-N * N - N)


def layer_normalization(k, x='x', s='s'):
    """``r_k(x) = (a(s + i x) a(s_bar - i x_bar))^{k-1}``."""
    return AFactorProduct(numerator=[_p(s) + I * _p(x),
                                     (_p(s) - I * _p(x)).flip()]) ** (k - 1)
