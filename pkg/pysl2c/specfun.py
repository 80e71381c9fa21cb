#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# specfun.py

"""
Complex special functions: log-gamma, the a-function, the complex-field gamma
function, Bessel J_n and the single-valued power ``[z]^alpha``.

Exponents come in pairs ``(alpha, alpha_bar)`` with an integer gap
``n = alpha - alpha_bar``; ``[z]^alpha = z^alpha * conj(z)^alpha_bar`` is then
single valued and equals ``|z|^(alpha + alpha_bar) * exp(i n arg z)``.
"""

import cmath
import math
from collections import namedtuple

import numpy as np
from scipy import special

from .constants import GAP_TOL, POLE_TOL
from .exceptions import PoleError, SingularityError
from .utils import i_power, minus_one_power


class BiIndex(namedtuple('BiIndex', ['alpha', 'alpha_bar', 'n'])):

    """A pair of complex exponents whose difference is an integer.

    Args:
        alpha (complex): The holomorphic exponent.
        alpha_bar (complex): The antiholomorphic exponent. Defaults to
            ``alpha``.

    Keyword Args:
        n (int): The exact gap ``alpha - alpha_bar``. When omitted it is read
            off the values, which must then be within ``GAP_TOL`` of an
            integer.

    Examples:
        >>> BiIndex(1.2, 0.2).n
        1
        >>> (BiIndex(0.5) + 1).alpha
        (1.5+0j)
    """

    __slots__ = ()

    def __new__(cls, alpha, alpha_bar=None, n=None):
        alpha = complex(alpha)
        alpha_bar = alpha if alpha_bar is None else complex(alpha_bar)
        gap = alpha - alpha_bar
        if n is None:
            n = int(round(gap.real))
            tol = GAP_TOL
        else:
            n = int(n)
            tol = 1e-6 * max(1.0, abs(alpha), abs(alpha_bar))
        if abs(gap - n) > tol:
            raise ValueError('invalid bi-index: alpha - alpha_bar = {} is not '
                             'an integer'.format(gap))
        return super().__new__(cls, alpha, alpha_bar, n)

    @property
    def total(self):
        """``alpha + alpha_bar``."""
        return self.alpha + self.alpha_bar

    def flip(self):
        """The conjugate bi-index ``(alpha_bar, alpha)``."""
        return BiIndex(self.alpha_bar, self.alpha, n=-self.n)

    def __add__(self, other):
        if isinstance(other, BiIndex):
            return BiIndex(self.alpha + other.alpha,
                           self.alpha_bar + other.alpha_bar,
                           n=self.n + other.n)
        return BiIndex(self.alpha + other, self.alpha_bar + other, n=self.n)

    __radd__ = __add__

    def __neg__(self):
        return BiIndex(-self.alpha, -self.alpha_bar, n=-self.n)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def serializable(self):
        return {'alpha': self.alpha, 'alpha_bar': self.alpha_bar, 'n': self.n}


class Spin(namedtuple('Spin', ['n_s', 'nu_s'])):

    """A principal-series representation label.

    ``s = (1 + n_s)/2 + i nu_s`` and ``s_bar = (1 - n_s)/2 + i nu_s``.
    """

    __slots__ = ()

    def __new__(cls, n_s=0, nu_s=0.0):
        if int(n_s) != n_s:
            raise ValueError('invalid spin: n_s = {} must be an '
                             'integer'.format(n_s))
        return super().__new__(cls, int(n_s), float(nu_s))

    @property
    def s(self):
        return complex((1 + self.n_s) / 2, self.nu_s)

    @property
    def s_bar(self):
        return complex((1 - self.n_s) / 2, self.nu_s)

    @property
    def index(self):
        return BiIndex(self.s, self.s_bar, n=self.n_s)

    def serializable(self):
        return {'n_s': self.n_s, 'nu_s': self.nu_s}


class SeparatedPoint(namedtuple('SeparatedPoint', ['n', 'nu'])):

    """A separated variable ``x = -i n/2 + nu``, ``x_bar = i n/2 + nu``.

    The imaginary part of ``nu`` is the regularization offset.
    """

    __slots__ = ()

    def __new__(cls, n=0, nu=0.0):
        if int(n) != n:
            raise ValueError('invalid separated point: n = {} must be an '
                             'integer'.format(n))
        return super().__new__(cls, int(n), complex(nu))

    @property
    def x(self):
        return -0.5j * self.n + self.nu

    @property
    def x_bar(self):
        return 0.5j * self.n + self.nu

    @property
    def offset(self):
        return self.nu.imag

    def with_offset(self, offset):
        """The same point with the imaginary part of ``nu`` replaced."""
        return SeparatedPoint(self.n, complex(self.nu.real, offset))

    def conjugate(self):
        """The point carrying the conjugated offset (bra side)."""
        return SeparatedPoint(self.n, self.nu.conjugate())

    def times_i(self):
        """The bi-index ``(i x, i x_bar)``, whose gap is exactly ``n``."""
        return BiIndex(1j * self.x, 1j * self.x_bar, n=self.n)

    def serializable(self):
        return {'n': self.n, 'nu': self.nu}


def _nonpositive_integer(z, tol=POLE_TOL):
    """Mask of entries within ``tol`` of 0, -1, -2, ..."""
    z = np.asarray(z, dtype=complex)
    nearest = np.round(z.real)
    return (nearest <= 0) & (np.abs(z - nearest) < tol)


def log_gamma(z):
    """Principal-branch ``log Gamma(z)``.

    Continued across ``Re z < 0`` with the branch cut on the negative real
    axis, matching the analytic continuation from ``z > 0``.

    Raises:
        PoleError: If ``z`` is a non-positive integer.

    >>> abs(log_gamma(1)) < 1e-15
    True
    >>> abs(log_gamma(0.5) - 0.5 * math.log(math.pi)) < 1e-15
    True
    """
    z = complex(z)
    if _nonpositive_integer(z):
        raise PoleError('log_gamma: pole of Gamma at z = {}'.format(z))
    return complex(special.loggamma(z))


def a_values(alpha, alpha_bar):
    """Vectorized ``a(alpha) = Gamma(1 - alpha_bar) / Gamma(alpha)``.

    Where ``Gamma(alpha)`` has a pole the value is exactly zero. Where both
    gammas have poles the limit along fixed integer gap is returned.

    Raises:
        PoleError: If ``1 - alpha_bar`` hits a pole while ``alpha`` does not.
    """
    alpha = np.asarray(alpha, dtype=complex)
    upper = 1 - np.asarray(alpha_bar, dtype=complex)
    shape = np.broadcast(alpha, upper).shape
    alpha = np.broadcast_to(alpha, shape).ravel()
    upper = np.broadcast_to(upper, shape).ravel()
    top_pole = _nonpositive_integer(upper)
    bottom_pole = _nonpositive_integer(alpha)
    bad = np.flatnonzero(top_pole & ~bottom_pole)
    if bad.size:
        raise PoleError('a-function pole: 1 - alpha_bar = {} with alpha = '
                        '{}'.format(upper[bad[0]], alpha[bad[0]]))
    regular = ~(top_pole | bottom_pole)
    out = np.zeros(alpha.shape, dtype=complex)
    out[regular] = np.exp(special.loggamma(upper[regular]) -
                          special.loggamma(alpha[regular]))
    for index in np.flatnonzero(top_pole & bottom_pole):
        m = -int(round(alpha[index].real))
        k = -int(round(upper[index].real))
        out[index] = (-minus_one_power(k + m) *
                      math.factorial(m) / math.factorial(k))
    return out.reshape(shape)


def a_factor(idx):
    """The a-function ``a(alpha) = Gamma(1 - alpha_bar)/Gamma(alpha)``.

    Args:
        idx (BiIndex): The argument.

    Raises:
        PoleError: If ``1 - alpha_bar`` is a pole of Gamma and ``alpha`` is
            not.

    >>> a_factor(BiIndex(0.5))
    (1+0j)
    """
    return complex(a_values(idx.alpha, idx.alpha_bar))


def _log_a(idx):
    """``(log |a|, arg a)`` of a regular factor, or ``None`` for a zero."""
    upper = 1 - idx.alpha_bar
    top, bottom = _nonpositive_integer(upper), _nonpositive_integer(idx.alpha)
    if top or bottom:
        value = a_factor(idx)
        if value == 0:
            return None
        return math.log(abs(value)), cmath.phase(value)
    log_a = log_gamma(upper) - log_gamma(idx.alpha)
    return log_a.real, log_a.imag


def a_product(indices):
    """Product ``a(alpha) a(beta) ...`` accumulated in log space.

    A zero factor gives zero only once no factor is singular.

    Args:
        indices (Iterable(BiIndex)): The factors.

    Raises:
        PoleError: Naming the position of the first singular factor.

    >>> a_product([])
    (1+0j)
    """
    log_modulus, phase = 0.0, 0.0
    zero = False
    for position, idx in enumerate(indices):
        try:
            logs = _log_a(idx)
        except PoleError as e:
            raise PoleError('a_product: factor {} ({}) is singular: {}'.format(
                position, tuple(idx), e)) from e
        if logs is None:
            zero = True
            continue
        log_modulus += logs[0]
        phase = math.fmod(phase + logs[1], 2 * math.pi)
    if zero:
        return 0j
    return cmath.rect(math.exp(log_modulus), phase)


def complex_field_gamma(idx):
    """Gamma function of the complex field.

    ``Gamma(alpha, alpha_bar) = i^n Gamma(alpha)/Gamma(1 - alpha_bar)``,
    computed as ``i^n a(1 - alpha_bar, 1 - alpha)``.

    Raises:
        PoleError: At poles of ``Gamma(alpha)``.

    >>> complex_field_gamma(BiIndex(1, 0))
    1j
    """
    reflected = BiIndex(1 - idx.alpha_bar, 1 - idx.alpha, n=idx.n)
    return i_power(idx.n) * a_factor(reflected)


def power_bi(z, idx):
    """The single-valued power ``[z]^idx = z^alpha conj(z)^alpha_bar``.

    Accepts a scalar or an array of points.

    Raises:
        SingularityError: At ``z = 0`` unless ``Re(alpha + alpha_bar) > 0``.

    >>> abs(power_bi(2j, BiIndex(1, 0)) - 2j) < 1e-15
    True
    >>> abs(power_bi(-1, BiIndex(1.5, 0.5)) + 1) < 1e-15
    True
    """
    scalar = np.isscalar(z)
    z = np.asarray(z, dtype=complex)
    modulus = np.abs(z)
    zero = modulus == 0
    if zero.any() and idx.total.real <= 0:
        raise SingularityError('power_bi: [0]^{} with Re(alpha + alpha_bar) = '
                               '{} <= 0'.format(tuple(idx), idx.total.real))
    safe = np.where(zero, 1.0, modulus)
    unit = np.where(zero, 1.0, z / safe)
    out = np.exp(idx.total * np.log(safe)) * unit ** idx.n
    out = np.where(zero, 0j, out)
    return complex(out) if scalar else out


def bessel_j(n, x):
    """Bessel function ``J_n(x)`` of integer order.

    ``J_{-n} = (-1)^n J_n`` is applied exactly.

    >>> bessel_j(0, 0)
    1.0
    """
    n = int(n)
    value = special.jv(abs(n), x)
    if n < 0 and n % 2:
        value = -value
    return float(value) if np.isscalar(x) else value


def a_function_properties(idx):
    """Residuals of the four a-function identities at ``idx``.

    Returns:
        dict: ``reflection`` for ``a(alpha) a(1 - alpha_bar) = 1``,
        ``shift`` for ``a(1 + alpha) = -a(alpha)/(alpha alpha_bar)``,
        ``complement`` for ``a(alpha) a(1 - alpha) = (-1)^n`` and ``flip``
        for ``a(alpha) = (-1)^n a(alpha_bar)``; shift and flip are relative.
    """
    sign = minus_one_power(idx.n)
    a = a_factor(idx)
    reflected = a_factor(BiIndex(1 - idx.alpha_bar, 1 - idx.alpha, n=idx.n))
    complement = a_factor(BiIndex(1 - idx.alpha, 1 - idx.alpha_bar,
                                  n=-idx.n))
    shifted = a_factor(idx + 1)
    expected_shift = -a / (idx.alpha * idx.alpha_bar)
    flipped = a_factor(idx.flip())
    scale = abs(a) or 1.0
    return {
        'reflection': abs(a * reflected - 1),
        'shift': abs(shifted - expected_shift) / (abs(expected_shift) or 1.0),
        'complement': abs(a * complement - sign),
        'flip': abs(a - sign * flipped) / scale,
    }
