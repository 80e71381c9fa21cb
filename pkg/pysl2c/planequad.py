#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# planequad.py

"""
Adaptive quadrature over the complex plane, ``d^2z = dx dy``.

The plane is covered by a smooth partition of unity: a polar disk around
every declared singularity, where the radial substitution
``r = rho t^(2/(2 - sigma))`` absorbs the local power ``|z - z0|^-sigma``,
plus a polar chart for the residual inside radius ``R`` and an inversion
chart ``r = R t^(-2/(D - 2))`` for the exterior, which absorbs the decay
``|z|^-D``. All cells share one global largest-error-first refinement with a
tensor Gauss-Kronrod (7, 15) rule, and the final value is summed in a fixed
cell order, so a plan always produces the same bits.

Integrands with a plane-wave factor ``exp(i(p z + conj(p z)))`` never see
the exterior in 2D: there the angular harmonics are taken by FFT and the
radial Bessel integrals are summed half-period by half-period with Wynn's
epsilon acceleration.

Integrands are vectorized: they take an array of points and return an array
of values.
"""

import heapq
import itertools
import logging
import math
from collections import namedtuple

import numpy as np
from scipy import special

from .exceptions import NonConvergence, PlanError
from .specfun import BiIndex
from .utils import wynn_epsilon

log = logging.getLogger(__name__)

# Gauss-Kronrod (7, 15) abscissae and weights, as in QUADPACK's qk15.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate((-_XGK[:7], _XGK[7:], _XGK[6::-1]))
KRONROD = np.concatenate((_WGK[:7], _WGK[7:], _WGK[6::-1]))
GAUSS = np.zeros(15)
GAUSS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate((_WG, _WG[2::-1]))
RULE_SIZE = len(NODES)

# Number of angular samples for the exterior harmonics of oscillatory plans.
HARMONICS = 128
MAX_TAIL_INTERVALS = 600
DEFAULT_BUDGET = 2000000
DEFAULT_ABS_FLOOR = 1e-15


class Singularity(namedtuple('Singularity', ['location', 'strength'])):

    """A point where the integrand behaves like ``[z - location]^-strength``.

    ``strength`` may be a BiIndex or a number (both slots equal).
    """

    __slots__ = ()

    def __new__(cls, location, strength):
        if not isinstance(strength, BiIndex):
            strength = BiIndex(strength)
        return super().__new__(cls, complex(location), strength)

    @property
    def sigma(self):
        return self.strength.total.real

    def serializable(self):
        return {'location': self.location, 'strength': self.strength}


class QuadPlan(namedtuple('QuadPlan', [
        'singularities', 'decay_at_infinity', 'oscillation',
        'target_rel_error', 'max_evaluations', 'abs_floor', 'scale'])):

    """How to integrate one integrand over the plane.

    Keyword Args:
        singularities (Iterable(Singularity)): Declared singular points.
        decay_at_infinity (float | BiIndex): ``D`` in ``|f| ~ |z|^-D``;
            a BiIndex contributes ``Re(alpha + alpha_bar)``.
        oscillation (complex): The momentum ``p`` of a plane-wave factor
            ``exp(i(p z + conj(p z)))``, or ``None``.
        target_rel_error (float): Relative error target.
        max_evaluations (int): Budget of integrand evaluations.
        abs_floor (float): Absolute error that always counts as converged.
        scale (float): Radius used when no singularity sets one.

    Raises:
        PlanError: If a singularity is not integrable or a non-oscillatory
            integrand does not decay faster than ``|z|^-2``.
    """

    __slots__ = ()

    def __new__(cls, singularities=(), decay_at_infinity=4.0,
                oscillation=None, target_rel_error=1e-8,
                max_evaluations=DEFAULT_BUDGET, abs_floor=DEFAULT_ABS_FLOOR,
                scale=1.0):
        singularities = tuple(
            s if isinstance(s, Singularity) else Singularity(*s)
            for s in singularities)
        if isinstance(decay_at_infinity, BiIndex):
            decay_at_infinity = decay_at_infinity.total.real
        decay_at_infinity = float(decay_at_infinity)
        if oscillation is not None:
            oscillation = complex(oscillation)
            if oscillation == 0:
                oscillation = None
        for s in singularities:
            if s.sigma >= 2:
                raise PlanError('invalid plan: singularity at {} with '
                                'Re(strength) = {} is not integrable'.format(
                                    s.location, s.sigma))
        locations = [s.location for s in singularities]
        if len(set(locations)) != len(locations):
            raise PlanError('invalid plan: repeated singular point')
        if oscillation is None and decay_at_infinity <= 2:
            raise PlanError('invalid plan: decay exponent {} <= 2 at '
                            'infinity'.format(decay_at_infinity))
        if oscillation is not None and decay_at_infinity <= 0.5:
            raise PlanError('invalid plan: oscillatory decay exponent {} <= '
                            '1/2'.format(decay_at_infinity))
        if not target_rel_error > 0:
            raise PlanError('invalid plan: target_rel_error must be positive')
        if max_evaluations < RULE_SIZE ** 2:
            raise PlanError('invalid plan: max_evaluations below one cell')
        return super().__new__(cls, singularities, decay_at_infinity,
                               oscillation, float(target_rel_error),
                               int(max_evaluations), float(abs_floor),
                               float(scale))

    def tightened(self, factor):
        """The same plan with the error target divided by ``factor``."""
        return self._replace(target_rel_error=self.target_rel_error / factor,
                             abs_floor=self.abs_floor / factor)

    def serializable(self):
        return {
            'singularities': self.singularities,
            'decay_at_infinity': self.decay_at_infinity,
            'oscillation': self.oscillation,
            'target_rel_error': self.target_rel_error,
            'max_evaluations': self.max_evaluations,
        }


class IntegralEstimate(namedtuple('IntegralEstimate', [
        'value', 'abs_error_estimate', 'evaluations', 'converged'])):

    """Result of a quadrature."""

    __slots__ = ()

    def __add__(self, other):
        return IntegralEstimate(
            self.value + other.value,
            self.abs_error_estimate + other.abs_error_estimate,
            self.evaluations + other.evaluations,
            self.converged and other.converged)

    def scaled(self, factor):
        return self._replace(value=self.value * factor,
                             abs_error_estimate=(self.abs_error_estimate *
                                                 abs(factor)))

    def serializable(self):
        return {'value': self.value,
                'abs_error_estimate': self.abs_error_estimate,
                'evaluations': self.evaluations,
                'converged': self.converged}


# Adaptive refinement
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def _ordered_sum(values):
    """Sum complex scalars (or arrays) in the given order, exactly rounded
    for scalars."""
    if not values:
        return 0j
    if np.ndim(values[0]) == 0:
        return complex(math.fsum(v.real for v in values),
                       math.fsum(v.imag for v in values))
    return np.add.reduce(np.stack(values), axis=0)


def _magnitude(value):
    """``|value|`` for a scalar, ``|sum(value)|`` for a vector of terms."""
    return abs(np.sum(value)) if np.ndim(value) else abs(value)


def _refine(regions, evaluate, split, cost, target_rel_error, abs_floor,
            max_evaluations, extra_error=0.0, resync=64):
    """Largest-error-first refinement over a set of regions.

    ``evaluate(region)`` returns ``(value, error, hint)`` and
    ``split(region, hint)`` the child regions. Regions must be orderable;
    the final value is summed in region order. Ties in the error heap are
    broken by creation order.

    Returns:
        IntegralEstimate
    """
    counter = itertools.count()
    pieces = {}
    heap = []
    evaluations = 0

    def add(region):
        nonlocal evaluations
        value, error, hint = evaluate(region)
        evaluations += cost
        index = next(counter)
        pieces[index] = (region, value, error, hint)
        heapq.heappush(heap, (-error, index))
        return value, error

    for region in regions:
        add(region)

    def exact_totals():
        ordered = sorted(pieces.values(), key=lambda piece: piece[0])
        return (_ordered_sum([piece[1] for piece in ordered]),
                math.fsum(piece[2] for piece in ordered))

    value, error = exact_totals()
    steps = 0
    while True:
        tolerance = max(target_rel_error * _magnitude(value), abs_floor)
        if error + extra_error <= tolerance:
            value, error = exact_totals()
            if error + extra_error <= tolerance:
                break
        if evaluations + 2 * cost > max_evaluations or not heap:
            value, error = exact_totals()
            break
        _, index = heapq.heappop(heap)
        region, old_value, old_error, hint = pieces.pop(index)
        value = value - old_value
        error = error - old_error
        for child in split(region, hint):
            child_value, child_error = add(child)
            value = value + child_value
            error = error + child_error
        steps += 1
        if steps % resync == 0:
            value, error = exact_totals()
    tolerance = max(target_rel_error * _magnitude(value), abs_floor)
    converged = error + extra_error <= tolerance
    return IntegralEstimate(value, error, evaluations, converged)


def _require(estimate, what):
    if not estimate.converged:
        raise NonConvergence(
            '{}: budget of evaluations exhausted with error estimate {:.3g} '
            'on value {}'.format(what, estimate.abs_error_estimate,
                                 estimate.value), estimate=estimate)
    return estimate


# One dimension
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def _gk_segment(f, lo, hi):
    half = 0.5 * (hi - lo)
    x = 0.5 * (hi + lo) + half * NODES
    y = np.asarray(f(x), dtype=complex)
    kronrod = half * np.tensordot(KRONROD, y, axes=1)
    gauss = half * np.tensordot(GAUSS, y, axes=1)
    error = float(np.sum(np.abs(kronrod - gauss)))
    if not np.all(np.isfinite(kronrod)):
        error = math.inf
    return kronrod, error, None


def integrate_interval(f, a, b, target_rel_error=1e-10,
                       abs_floor=DEFAULT_ABS_FLOOR,
                       max_evaluations=DEFAULT_BUDGET, breakpoints=(),
                       strict=True):
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[a, b]``.

    ``f`` maps an array of abscissae to values of shape ``(len(x),)`` or
    ``(len(x), K)``; a vector-valued integrand is integrated componentwise
    and its error target refers to the sum of the components.

    Keyword Args:
        breakpoints (Iterable(float)): Interior points where ``f`` is not
            smooth; they always fall on segment boundaries.
        strict (bool): Raise NonConvergence instead of returning an
            unconverged estimate.
    """
    edges = sorted({float(a), float(b)} |
                   {float(x) for x in breakpoints if a < x < b})
    regions = list(zip(edges[:-1], edges[1:]))

    def evaluate(region):
        return _gk_segment(f, *region)

    def split(region, _):
        lo, hi = region
        mid = 0.5 * (lo + hi)
        return [(lo, mid), (mid, hi)]

    estimate = _refine(regions, evaluate, split, RULE_SIZE, target_rel_error,
                       abs_floor, max_evaluations)
    return _require(estimate, 'integrate_interval') if strict else estimate


# Two dimensions
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def _smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
        rise = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        fall = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1 - t, 1.0)),
                        0.0)
    return rise / (rise + fall)


class _Partition:

    """Bumps equal to 1 within ``rho/2`` of each singularity and 0 beyond
    ``rho``."""

    def __init__(self, singularities, scale):
        self.locations = np.array([s.location for s in singularities],
                                  dtype=complex)
        self.radii = np.array([self._radius(i, scale)
                               for i in range(len(self.locations))])

    def _radius(self, i, scale):
        others = np.delete(self.locations, i)
        if not len(others):
            return scale
        return min(scale, 0.4 * float(np.min(np.abs(others -
                                                    self.locations[i]))))

    def bump(self, i, r):
        rho = self.radii[i]
        return _smooth_step((rho - r) / (0.5 * rho))

    def residual(self, z):
        weight = np.ones(np.shape(z))
        for i, location in enumerate(self.locations):
            weight = weight - self.bump(i, np.abs(z - location))
        return weight


class _DiskChart:

    def __init__(self, partition, i, sigma):
        self.partition = partition
        self.i = i
        self.center = partition.locations[i]
        self.radius = partition.radii[i]
        self.power = 2.0 / (2.0 - max(sigma, 0.0))
        self.initial = [(0.0, 1.0, k * math.pi / 2, (k + 1) * math.pi / 2)
                        for k in range(4)]

    def map(self, tau, theta):
        r = self.radius * tau ** self.power
        jacobian = r * self.radius * self.power * tau ** (self.power - 1)
        z = self.center + r * np.exp(1j * theta)
        return z, jacobian * self.partition.bump(self.i, r)


class _InnerChart:

    def __init__(self, partition, center, radius):
        self.partition = partition
        self.center = center
        self.radius = radius
        self.initial = [(j * 0.5, (j + 1) * 0.5,
                         k * math.pi / 2, (k + 1) * math.pi / 2)
                        for j in range(2) for k in range(4)]

    def map(self, tau, theta):
        r = self.radius * tau
        z = self.center + r * np.exp(1j * theta)
        return z, r * self.radius * self.partition.residual(z)


class _OuterChart:

    def __init__(self, partition, center, radius, decay):
        self.partition = partition
        self.center = center
        self.radius = radius
        self.power = 2.0 / (decay - 2.0)
        self.initial = [(0.0, 1.0, k * math.pi / 2, (k + 1) * math.pi / 2)
                        for k in range(4)]

    def map(self, tau, theta):
        r = self.radius * tau ** -self.power
        jacobian = r * self.radius * self.power * tau ** (-self.power - 1)
        z = self.center + r * np.exp(1j * theta)
        return z, jacobian * self.partition.residual(z)


def _gk_cell(f, chart, u0, u1, v0, v1):
    hu, hv = 0.5 * (u1 - u0), 0.5 * (v1 - v0)
    u = 0.5 * (u0 + u1) + hu * NODES
    v = 0.5 * (v0 + v1) + hv * NODES
    uu, vv = np.meshgrid(u, v, indexing='ij')
    z, weight = chart.map(uu.ravel(), vv.ravel())
    values = np.zeros(z.shape, dtype=complex)
    live = weight != 0
    if live.any():
        values[live] = np.asarray(f(z[live]), dtype=complex) * weight[live]
    grid = values.reshape(RULE_SIZE, RULE_SIZE) * (hu * hv)
    kk = KRONROD @ grid @ KRONROD
    gg = GAUSS @ grid @ GAUSS
    gk = GAUSS @ grid @ KRONROD
    kg = KRONROD @ grid @ GAUSS
    error = abs(kk - gg)
    axis = 0 if abs(kk - gk) >= abs(kk - kg) else 1
    if not np.isfinite(kk):
        error = math.inf
    return complex(kk), float(error), axis


def _compact_charts(plan):
    partition = _Partition(plan.singularities, plan.scale)
    center = (complex(np.mean(partition.locations))
              if len(partition.locations) else 0j)
    reach = max([abs(s - center) + r for s, r in
                 zip(partition.locations, partition.radii)] or [0.0])
    radius = max(2.0 * reach, plan.scale)
    charts = [_DiskChart(partition, i, s.sigma)
              for i, s in enumerate(plan.singularities)]
    charts.append(_InnerChart(partition, center, radius))
    return charts, partition, center, radius


def _plane_wave(p):
    def wave(z):
        return np.exp(2j * (p * z).real)
    return wave


def integrate_plane(f, plan):
    """Integrate ``f`` over the complex plane.

    Args:
        f (Callable): Vectorized integrand ``f(z)``; for an oscillatory plan
            the plane wave is supplied by the plan and not included in
            ``f``.
        plan (QuadPlan): Singularities, decay, target and budget.

    Returns:
        IntegralEstimate: Converged to the plan's target.

    Raises:
        NonConvergence: If the budget runs out; the partial estimate is
            attached.
    """
    oscillatory = plan.oscillation is not None
    charts, partition, center, radius = _compact_charts(plan)
    integrand = f
    tail = None
    if oscillatory:
        wave = _plane_wave(plan.oscillation)

        def integrand(z):
            return f(z) * wave(z)

        tail = _oscillatory_exterior(f, plan, center, radius)
    else:
        charts.append(_OuterChart(partition, center, radius,
                                  plan.decay_at_infinity))
    regions = [(k,) + cell for k, chart in enumerate(charts)
               for cell in chart.initial]

    def evaluate(region):
        return _gk_cell(integrand, charts[region[0]], *region[1:])

    def split(region, axis):
        k, u0, u1, v0, v1 = region
        if axis == 0:
            mid = 0.5 * (u0 + u1)
            return [(k, u0, mid, v0, v1), (k, mid, u1, v0, v1)]
        mid = 0.5 * (v0 + v1)
        return [(k, u0, u1, v0, mid), (k, u0, u1, mid, v1)]

    budget = plan.max_evaluations - (tail.evaluations if tail else 0)
    extra = tail.abs_error_estimate if tail else 0.0
    estimate = _refine(regions, evaluate, split, RULE_SIZE ** 2,
                       plan.target_rel_error, plan.abs_floor,
                       max(budget, RULE_SIZE ** 2 * len(regions)),
                       extra_error=extra)
    if tail is not None:
        estimate = estimate + tail
        tolerance = max(plan.target_rel_error * abs(estimate.value),
                        plan.abs_floor)
        estimate = estimate._replace(
            converged=(estimate.converged and
                       estimate.abs_error_estimate <= tolerance))
    log.debug('integrate_plane: %d charts, value %s, error %.3g, %d '
              'evaluations', len(charts), estimate.value,
              estimate.abs_error_estimate, estimate.evaluations)
    return _require(estimate, 'integrate_plane')


def integrate_exterior(f, radius, decay, target_rel_error=1e-10,
                       center=0j, max_evaluations=DEFAULT_BUDGET):
    """Integrate ``f`` over ``|z - center| > radius`` in the inversion chart.

    ``f`` must be smooth there and decay like ``|z|^-decay`` with
    ``decay > 2``.
    """
    if decay <= 2:
        raise PlanError('invalid exterior: decay exponent {} <= 2'.format(
            decay))
    partition = _Partition((), radius)
    chart = _OuterChart(partition, complex(center), float(radius),
                        float(decay))
    regions = [(0,) + cell for cell in chart.initial]

    def evaluate(region):
        return _gk_cell(f, chart, *region[1:])

    def split(region, axis):
        k, u0, u1, v0, v1 = region
        if axis == 0:
            mid = 0.5 * (u0 + u1)
            return [(k, u0, mid, v0, v1), (k, mid, u1, v0, v1)]
        mid = 0.5 * (v0 + v1)
        return [(k, u0, u1, v0, mid), (k, u0, u1, mid, v1)]

    estimate = _refine(regions, evaluate, split, RULE_SIZE ** 2,
                       target_rel_error, DEFAULT_ABS_FLOOR, max_evaluations)
    return _require(estimate, 'integrate_exterior')


# Oscillatory radial integrals
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def accelerated_sum(intervals, term, target_rel_error, abs_floor, budget,
                     what, min_terms=8):
    """Sum ``term(lo, hi)`` over consecutive intervals with Wynn epsilon.

    ``term`` returns an IntegralEstimate. Stops once the accelerated limit
    is stable to the target.
    """
    partial, total = [], 0j
    quadrature_error, evaluations = 0.0, 0
    limit, wynn_error = 0j, math.inf
    for count, (lo, hi) in enumerate(intervals, start=1):
        piece = term(lo, hi)
        total += piece.value
        quadrature_error += piece.abs_error_estimate
        evaluations += piece.evaluations
        partial.append(total)
        limit, wynn_error = wynn_epsilon(partial[-24:])
        tolerance = max(target_rel_error * abs(limit), abs_floor)
        if count >= min_terms and wynn_error <= tolerance:
            return IntegralEstimate(limit, wynn_error + quadrature_error,
                                    evaluations, True)
        if evaluations > budget or count >= MAX_TAIL_INTERVALS:
            break
    estimate = IntegralEstimate(limit, wynn_error + quadrature_error,
                                evaluations, False)
    raise NonConvergence('{}: acceleration stagnated after {} intervals '
                         '(error {:.3g})'.format(what, len(partial),
                                                 wynn_error),
                         estimate=estimate)


def _half_periods(start, p_mag):
    step = math.pi / (2.0 * p_mag)
    for k in itertools.count():
        yield start + k * step, start + (k + 1) * step


def _oscillatory_exterior(f, plan, center, radius):
    """``int_{|z - c| > R} f(z) exp(i(p z + c.c.)) d^2z`` by harmonics."""
    p = plan.oscillation
    p_mag, p_arg = abs(p), np.angle(p)
    orders = np.fft.fftfreq(HARMONICS, 1.0 / HARMONICS).astype(int)
    angles = 2 * math.pi * np.arange(HARMONICS) / HARMONICS
    weights = (2 * math.pi * (1j ** (orders % 4)) *
               np.exp(-1j * orders * p_arg) *
               np.exp(2j * (p * center).real))

    def radial(r):
        r = np.asarray(r, dtype=float)
        z = center + r[:, None] * np.exp(1j * angles)[None, :]
        samples = np.asarray(f(z.ravel()), dtype=complex).reshape(z.shape)
        coefficients = np.fft.fft(samples, axis=1) / HARMONICS
        bessel = special.jv(orders[None, :], 2 * p_mag * r[:, None])
        return r * (coefficients * bessel) @ weights

    def term(lo, hi):
        return integrate_interval(radial, lo, hi,
                                  plan.target_rel_error / 10,
                                  plan.abs_floor / 10,
                                  plan.max_evaluations)

    estimate = accelerated_sum(_half_periods(radius, p_mag), term,
                                plan.target_rel_error / 2, plan.abs_floor,
                                plan.max_evaluations // 2,
                                'integrate_plane (oscillatory exterior)')
    return estimate._replace(evaluations=estimate.evaluations * HARMONICS)


def integrate_radial_oscillatory(f_radial, n, p_mag, plan):
    """``int_0^inf r f(r) J_n(2 |p| r) dr``.

    The first interval ends at the first zero of ``J_n`` and absorbs the
    power ``r^-sigma`` of a singularity declared at the origin; later
    intervals run between consecutive zeros and the alternating partial
    sums are accelerated.

    Raises:
        NonConvergence: If the acceleration stagnates.
    """
    n = int(n)
    p_mag = float(p_mag)
    if p_mag <= 0:
        raise PlanError('invalid radial plan: |p| = {} must be positive'.format(
            p_mag))
    sigma = max([s.sigma for s in plan.singularities if s.location == 0] or
                [0.0])
    power = 2.0 / (2.0 - max(sigma, 0.0))
    scale = 2.0 * p_mag

    def integrand(r):
        return r * np.asarray(f_radial(r), dtype=complex) * \
            special.jv(n, scale * r)

    def zeros():
        count = 64
        while True:
            found = special.jn_zeros(abs(n), count) / scale
            if count > 64:
                found = found[count // 2:]
            yield from found
            count *= 2

    def intervals():
        previous = 0.0
        for zero in zeros():
            yield previous, zero
            previous = zero

    def term(lo, hi):
        if lo == 0.0:
            # r = hi t^power absorbs r^(1 - sigma).
            def mapped(t):
                r = hi * t ** power
                return integrand(r) * hi * power * t ** (power - 1)
            return integrate_interval(mapped, 0.0, 1.0,
                                      plan.target_rel_error / 10,
                                      plan.abs_floor / 10,
                                      plan.max_evaluations)
        return integrate_interval(integrand, lo, hi,
                                  plan.target_rel_error / 10,
                                  plan.abs_floor / 10, plan.max_evaluations)

    return accelerated_sum(intervals(), term, plan.target_rel_error,
                            plan.abs_floor, plan.max_evaluations,
                            'integrate_radial_oscillatory')
