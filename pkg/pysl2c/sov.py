#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# sov.py

"""
Separated-variable eigenfunctions of the SL(2,C) spin chain.

``Psi_A`` is built layer by layer from the operators ``Lambda_k`` and is
turned into a diagram (see :mod:`pysl2c.diagrams`), so it can be evaluated
by nested quadrature and reduced by the rewrite rules. ``Psi_B`` starts from
a plane wave. The monodromy-matrix entries act on sampled functions through
fourth-order finite-difference stencils.

Ket-side separated variables carry the positive imaginary offset of
:class:`ChainConfig`; bra-side variables carry the negative one.
"""

import cmath
import itertools
import logging
import math
import time
from collections import namedtuple

import numpy as np

from .constants import DEFAULT_REGULARIZATION, REGULARIZATION_SWEEP
from .diagrams import (Diagram, Edge, eval_diagram, fourier_closed_form,
                       fourier_transform, rewrite_chain, rewrite_cross)
from .exceptions import (ConfigError, PlanError, PoleError, SingularityError,
                         StencilError)
from .planequad import (DEFAULT_BUDGET, IntegralEstimate, QuadPlan,
                        Singularity, integrate_plane)
from .report import Report
from .specfun import BiIndex, SeparatedPoint, Spin, power_bi
from .symalg import (AFactorProduct, AffineExpr, I, ba_closed_form,
                     layer_normalization, measure_a_product,
                     measure_b_product, txx_closed_form)
from .utils import rel_dev

log = logging.getLogger(__name__)

MAX_N = 3
ORIGIN = 'z0'
BRA_ORIGIN = 'o'
KERNEL_POINT = 'a'
BRA_POINT = 'w'

ANCHORS = {
    'psi_a_symmetry': 'Psi_A(x1, x2 | z) = Psi_A(x2, x1 | z)',
    'eigen_a': 'A_N(u) Psi_A(x|z) = prod_k (u - x_k) Psi_A(x|z)',
    'eigen_b': 'B_N(u) Psi_B(p, x|z) = p prod_k (u - x_k) Psi_B(p, x|z)',
    'txx': 'shift matrix element: int conj(Psi_A(x\'|z)) Psi_A(x|z - z0) = '
           '(-1)^[A_X] [z0]^(i(X - X\')) prod q(x_k, x\'_j)',
    'ba': 'scalar product <Psi_B(p, u)|Psi_A(x)> = i^[A_X] pi^N '
          '|p|^(-N-1) [p]^A_X prod a(s_bar - i x_bar_k) prod q(x_k, u_j)',
    'unitarity': 'group action: <T_g phi|T_g psi> = <phi|psi>',
    'orthogonality': 'smeared orthogonality: int d^2z [z]^(ix-s) '
                     'conj([z]^(ix\'-s)) = 2 pi^2 delta(x - x\')',
    'completeness_b': 'B-system completeness: int d^2p mu_B Psi_B(p|z) '
                      'conj(Psi_B(p|w)) = delta^2(z - w)',
}


# Configuration types
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def _spin(value):
    if isinstance(value, Spin):
        return value
    if isinstance(value, dict):
        return Spin(**value)
    return Spin(*value)


def _separated(value):
    if isinstance(value, SeparatedPoint):
        return value
    if isinstance(value, dict):
        return SeparatedPoint(**value)
    return SeparatedPoint(*value)


class ChainConfig(namedtuple('ChainConfig', ['N', 'spin',
                                             'regularization'])):

    """A homogeneous chain of ``N`` sites.

    Args:
        N (int): Number of sites, 1 to 3.

    Keyword Args:
        spin (Spin | dict | list): The spin of every site. A list of
            per-site spins is accepted when all entries agree.
        regularization (float): Imaginary offset of ket-side ``nu``.

    Raises:
        ConfigError: On an unsupported ``N``, an inhomogeneous chain or a
            nonpositive offset.
    """

    __slots__ = ()

    def __new__(cls, N, spin=None, regularization=DEFAULT_REGULARIZATION):
        if int(N) != N or not 1 <= N <= MAX_N:
            raise ConfigError('invalid chain: N = {} must be an integer in '
                              '1..{}'.format(N, MAX_N))
        if spin is None:
            spin = Spin()
        elif isinstance(spin, list):
            spins = set(_spin(s) for s in spin)
            if len(spins) != 1 or len(spin) != N:
                raise ConfigError('invalid chain: expected {} equal spins, '
                                  'got {}'.format(N, spin))
            spin = spins.pop()
        else:
            spin = _spin(spin)
        if not regularization > 0:
            raise ConfigError('invalid chain: regularization must be '
                              'positive, got {}'.format(regularization))
        return super().__new__(cls, int(N), spin, float(regularization))

    @classmethod
    def from_dict(cls, d):
        return cls(d['N'], d.get('spin'),
                   d.get('regularization', DEFAULT_REGULARIZATION))

    def ket(self, points):
        """The points with offset ``+regularization``."""
        return [_separated(x).with_offset(self.regularization)
                for x in points]

    def bra(self, points):
        """The points with offset ``-regularization``."""
        return [_separated(x).with_offset(-self.regularization)
                for x in points]

    def serializable(self):
        return {'N': self.N, 'spin': self.spin,
                'regularization': self.regularization}


class LayerKernel(namedtuple('LayerKernel', ['k', 'x', 'variant', 'z0'])):

    """The kernel of ``Lambda_k(x)`` and of its dressed variants.

    ``variant`` is ``'plain'``, ``'tilde'`` (times ``[z_k]^(ix-s)``) or
    ``'shifted'`` (the tilde kernel with every point moved by ``z0``).
    """

    __slots__ = ()

    VARIANTS = ('plain', 'tilde', 'shifted')

    def __new__(cls, k, x, variant='plain', z0=0j):
        if variant not in cls.VARIANTS:
            raise ValueError('invalid layer kernel: unknown variant '
                             '`{}`'.format(variant))
        if int(k) != k or k < 1:
            raise ValueError('invalid layer kernel: arity {} must be a '
                             'positive integer'.format(k))
        return super().__new__(cls, int(k), _separated(x), variant,
                               complex(z0))

    @property
    def normalization(self):
        """``r_k(x)`` as an exact product."""
        return layer_normalization(self.k)


def layer_kernel(kernel, spin, z, w):
    """Evaluate a layer kernel at sites ``z`` and integration points ``w``.

    ``r_k prod_i [z_i - z_(i+1)]^(1-2s) [w_i - z_i]^(s+ix-1)
    [w_i - z_(i+1)]^(s-ix-1)``, times ``[z_k - z0]^(ix-s)`` for the dressed
    variants (``z0 = 0`` for ``'tilde'``).

    Args:
        kernel (LayerKernel): Arity, point and variant.
        spin (Spin): The site spin.
        z (list): ``k`` sites.
        w (list): ``k - 1`` integration points; entries may be arrays.
    """
    if len(z) != kernel.k or len(w) != kernel.k - 1:
        raise ValueError('layer_kernel: arity {} needs {} sites and {} '
                         'points, got {} and {}'.format(
                             kernel.k, kernel.k, kernel.k - 1, len(z),
                             len(w)))
    s, ix = spin.index, kernel.x.times_i()
    value = kernel.normalization.evaluate({'x': kernel.x, 's': spin})
    for i in range(kernel.k - 1):
        value = (value * power_bi(z[i] - z[i + 1], 1 - s - s) *
                 power_bi(w[i] - z[i], s + ix - 1) *
                 power_bi(w[i] - z[i + 1], s - ix - 1))
    if kernel.variant != 'plain':
        origin = kernel.z0 if kernel.variant == 'shifted' else 0j
        value = value * power_bi(z[-1] - origin, ix - s)
    return value


# Eigenfunctions
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def _param(name):
    return AffineExpr.param(name)


def _names(prefix, count):
    return ['{}{}'.format(prefix, k) for k in range(1, count + 1)]


def _psi_a_edges(s, xs, sites, origin, tag):
    """The lines of ``Psi_A(x|z)`` on named sites.

    ``Psi_A(x_1..x_N|z) = [z_N - o]^(ix_1-s) Lambda_N(x_1)[Psi_A(x_2..x_N|w)]``
    unrolled into lines; ``s`` and ``xs`` are affine expressions.

    Returns:
        tuple: Internal vertices (innermost first), edges and the product of
        the layer normalizations.
    """
    N, x = len(sites), xs[0]
    edges = [Edge(origin, sites[-1], s - I * x)]
    if N == 1:
        return [], edges, AFactorProduct()
    ws = _names(tag, N - 1)
    for i in range(N - 1):
        edges += [Edge(sites[i + 1], sites[i], 2 * s - 1),
                  Edge(sites[i], ws[i], 1 - s - I * x),
                  Edge(sites[i + 1], ws[i], 1 - s + I * x)]
    normalization = (AFactorProduct.a(s + I * x) *
                     AFactorProduct.a((s - I * x).flip())) ** (N - 1)
    inner, inner_edges, inner_normalization = _psi_a_edges(
        s, xs[1:], ws, origin, tag + tag[0])
    return (inner + ws, edges + inner_edges,
            normalization * inner_normalization)


def psi_a_diagram(N, z, z0=0j):
    """The diagram of ``Psi_A(x_1..x_N|z)`` with sites at ``z``.

    Indices depend on the parameters ``s`` and ``x1 .. xN``; the layer
    normalizations make up the prefactor.
    """
    if len(z) != N:
        raise ValueError('psi_a_diagram: expected {} sites, got '
                         '{}'.format(N, len(z)))
    sites = _names('z', N)
    vertices, edges, normalization = _psi_a_edges(
        _param('s'), [_param(x) for x in _names('x', N)], sites, ORIGIN, 'w')
    points = dict(zip(sites, z))
    points[ORIGIN] = z0
    return Diagram(points, vertices, edges, normalization)


def psi_a_kernel_diagram(z, a=0j, z0=0j):
    """The ``N = 3`` eigenfunction with its innermost point held at ``a``.

    ``Psi_A(x_1, x_2, x_3|z) = int d^2a K(z; a) [a - z0]^(ix_3-s)``; the
    kernel ``K`` is the diagram of ``Psi_A`` with the innermost vertex made
    the external point ``a`` and its line to ``z0`` removed. It keeps the two
    vertices of the outer layers and depends on ``s``, ``x1`` and ``x2``.
    """
    d = psi_a_diagram(3, z, z0)
    innermost = d.vertices[0]

    def rename(name):
        return KERNEL_POINT if name == innermost else name

    edges = [Edge(rename(e.tail), rename(e.head), e.index) for e in d.edges
             if {e.tail, e.head} != {ORIGIN, innermost}]
    points = d.positions
    points[KERNEL_POINT] = a
    return Diagram(points, d.vertices[1:], edges, d.prefactor)


def _values(cfg, x, prefix='x'):
    values = dict(zip(_names(prefix, len(x)), x))
    values['s'] = cfg.spin
    return values


def _psi_a_nested(cfg, x, z, z0, target_rel_error, budget):
    """``Psi_A`` at ``N = 3``: the kernel diagram at every node of a plane
    integral over its innermost point."""
    kernel = psi_a_kernel_diagram(z, z0=z0)
    values = _values(cfg, x[:2])
    s = cfg.spin.index
    dressing = s - x[2].times_i()
    # The kernel is logarithmic where the innermost point meets a site.
    singularities = [Singularity(z0, dressing)] + [
        Singularity(q, 0.0) for q in dict.fromkeys(z) if q != z0]
    plan = QuadPlan(singularities, decay_at_infinity=2 - s - s + dressing,
                    target_rel_error=target_rel_error, max_evaluations=budget)
    stats = {'evaluations': 0, 'error': 0.0}

    def integrand(a):
        a = np.asarray(a, dtype=complex)
        out = np.empty(a.shape, dtype=complex)
        for i, point in enumerate(a.ravel()):
            positions = kernel.positions
            positions[KERNEL_POINT] = point
            k = eval_diagram(Diagram(positions, kernel.vertices, kernel.edges,
                                     kernel.prefactor),
                             target_rel_error / 10, values=values,
                             budget=budget)
            stats['evaluations'] += k.evaluations
            stats['error'] = max(stats['error'], k.abs_error_estimate /
                                 max(abs(k.value), 1e-300))
            out.flat[i] = k.value
        return out * power_bi(a - z0, -dressing)

    start = time.perf_counter()
    estimate = integrate_plane(integrand, plan)
    log.info('psi_A: N = 3, %d outer nodes in %.1f s', estimate.evaluations,
             time.perf_counter() - start)
    return IntegralEstimate(
        estimate.value,
        estimate.abs_error_estimate + stats['error'] * abs(estimate.value),
        estimate.evaluations + stats['evaluations'], estimate.converged)


def psi_A(cfg, x, z, z0=0j, target_rel_error=1e-7, budget=DEFAULT_BUDGET):
    """The eigenfunction ``Psi_A(x|z)`` of the ``A_N`` entry.

    ``[z - z0]^(ix-s)`` at ``N = 1``; one plane integral at ``N = 2``. At
    ``N = 3`` the two-vertex kernel of :func:`psi_a_kernel_diagram` is
    integrated against ``[a - z0]^(ix_3-s)``, six real dimensions in all.

    Raises:
        SingularityError: At coincident points with a non-integrable
            exponent.
    """
    x = [_separated(v) for v in x]
    if len(x) != cfg.N:
        raise ValueError('psi_A: expected {} separated variables, got '
                         '{}'.format(cfg.N, len(x)))
    z = [complex(v) for v in z]
    if cfg.N == 3:
        return _psi_a_nested(cfg, x, z, complex(z0), target_rel_error,
                             budget).value
    d = psi_a_diagram(cfg.N, z, complex(z0))
    estimate = eval_diagram(d, target_rel_error, values=_values(cfg, x),
                            budget=budget)
    return estimate.value


def psi_B(cfg, p, x, z, target_rel_error=1e-7, budget=DEFAULT_BUDGET):
    """The eigenfunction ``Psi_B(p, x|z)`` of the ``B_N`` entry.

    ``exp(i(pz + conj(pz)))`` at ``N = 1``. At ``N = 2`` the layer integral
    ``|p| r_2(x) [z1 - z2]^(1-2s) int d^2w [w - z1]^(s+ix-1)
    [w - z2]^(s-ix-1) exp(i(pw + conj(pw)))`` runs on the oscillatory path.

    Raises:
        PlanError: For ``N = 3``, or for ``N = 2`` at ``p = 0``.
    """
    x = [_separated(v) for v in x]
    z = [complex(v) for v in z]
    p = complex(p)
    if len(x) != cfg.N - 1 or len(z) != cfg.N:
        raise ValueError('psi_B: expected {} separated variables and {} '
                         'sites, got {} and {}'.format(
                             cfg.N - 1, cfg.N, len(x), len(z)))
    if cfg.N == 1:
        return complex(np.exp(2j * (p * z[0]).real))
    if cfg.N > 2:
        raise PlanError('psi_B: quadrature is available up to N = 2')
    kernel = LayerKernel(2, x[0])
    alpha = 1 - cfg.spin.index - x[0].times_i()
    beta = 1 - cfg.spin.index + x[0].times_i()
    plan = QuadPlan([Singularity(z[0], alpha), Singularity(z[1], beta)],
                    decay_at_infinity=alpha + beta, oscillation=p,
                    target_rel_error=target_rel_error, max_evaluations=budget)

    def f(w):
        return layer_kernel(kernel, cfg.spin, z, [w])

    return abs(p) * integrate_plane(f, plan).value


def measure_A(N, x):
    """The Sklyanin measure of the A-system."""
    if len(x) != N:
        raise ValueError('measure_A: expected {} variables, got '
                         '{}'.format(N, len(x)))
    names = _names('x', N)
    return measure_a_product(names).evaluate(
        dict(zip(names, (_separated(v) for v in x))))


def measure_B(N, x):
    """The Sklyanin measure of the B-system (``N - 1`` variables)."""
    names = _names('x', len(x))
    return measure_b_product(names, N).evaluate(
        dict(zip(names, (_separated(v) for v in x))))


# Monodromy matrix
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

class MonodromyEntry(namedtuple('MonodromyEntry', ['which', 'N', 'u',
                                                   'u_bar', 'spin'])):

    """The entry ``A_N(u)`` or ``B_N(u)`` of the monodromy matrix.

    ``u_bar`` is an independent spectral parameter of the antiholomorphic
    copy; it defaults to ``conj(u)``.
    """

    __slots__ = ()

    def __new__(cls, which, N, u, u_bar=None, spin=None):
        if which not in ('A', 'B'):
            raise ValueError('invalid monodromy entry `{}`'.format(which))
        u = complex(u)
        u_bar = u.conjugate() if u_bar is None else complex(u_bar)
        spin = Spin() if spin is None else _spin(spin)
        return super().__new__(cls, which, int(N), u, u_bar, spin)

    @property
    def degree(self):
        """Polynomial degree in ``u``."""
        return self.N if self.which == 'A' else self.N - 1

    def eigenvalue(self, x, p=None, antiholomorphic=False):
        """``prod (u - x_k)``, times ``p`` for the ``B`` entry."""
        x = [_separated(v) for v in x]
        if len(x) != self.degree:
            raise ValueError('eigenvalue: {}_{} needs {} separated '
                             'variables'.format(self.which, self.N,
                                                self.degree))
        u = self.u_bar if antiholomorphic else self.u
        value = complex(1)
        for v in x:
            value *= u - (v.x_bar if antiholomorphic else v.x)
        if self.which == 'B':
            p = complex(p)
            value *= p.conjugate() if antiholomorphic else p
        return value


def _site_entry(i, j, u, s, z):
    """``(c, e)`` with ``L[i][j] = c + e d`` at one site."""
    if (i, j) == (0, 0):
        return u + 1j * s, 1j * z
    if (i, j) == (0, 1):
        return 0j, -1j
    if (i, j) == (1, 0):
        return 2j * s * z, 1j * z * z
    return u - 1j * s, -1j * z


def _paths(N, end):
    for middle in itertools.product((0, 1), repeat=N - 1):
        yield (0,) + middle + (end,)


# Fourth-order central differences.
_STENCIL = ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12))


def _steps(z, h, rel_step, singularities):
    steps = []
    for k, zk in enumerate(z):
        distances = ([abs(zk - q) for q in singularities] +
                     [abs(zk - zj) for j, zj in enumerate(z) if j != k])
        steps.append(float(h) if h else
                     rel_step * (min(distances) if distances else 1.0))
    for k, zk in enumerate(z):
        for q in singularities:
            if abs(zk - q) <= 2 * steps[k]:
                raise StencilError('stencil at site {} reaches the singular '
                                   'point {}'.format(k + 1, q))
        for j in range(k + 1, len(z)):
            if abs(zk - z[j]) <= 2 * (steps[k] + steps[j]):
                raise StencilError('stencils at sites {} and {} '
                                   'overlap'.format(k + 1, j + 1))
    return steps


def stencil_derivatives(f, z, h=None, rel_step=1e-3, singularities=(),
                        antiholomorphic=False):
    """Mixed derivatives of ``f`` at ``z`` over every subset of sites.

    ``d/dz = (d/dx - i d/dy)/2`` and ``d/dzbar = (d/dx + i d/dy)/2``; a
    subset ``S`` costs ``8^|S|`` evaluations of ``f``.

    Args:
        f (Callable): ``f(z)`` for a list of sites.
        z (list): The sites.

    Keyword Args:
        h (float): Step at every site; by default ``rel_step`` times the
            distance to the nearest other site or singular point.
        singularities (Iterable): Points the stencil must stay clear of.
        antiholomorphic (bool): Differentiate in ``zbar``.

    Returns:
        dict: Sorted site tuples to ``D_S f``; the empty tuple holds ``f``.

    Raises:
        StencilError: If the stencil touches a singularity or ``f`` is not
            finite on it.
    """
    z = [complex(v) for v in z]
    steps = _steps(z, h, rel_step, [complex(q) for q in singularities])
    axes = ((1.0, 0.5), (1j, 0.5j if antiholomorphic else -0.5j))

    def evaluate(point):
        try:
            value = complex(f(point))
        except (SingularityError, PoleError) as e:
            raise StencilError('stencil point {} is singular: {}'.format(
                point, e)) from e
        if not cmath.isfinite(value):
            raise StencilError('non-finite value at stencil point '
                               '{}'.format(point))
        return value

    derivatives = {(): evaluate(z)}
    for size in range(1, len(z) + 1):
        for subset in itertools.combinations(range(len(z)), size):
            legs = [[(direction * j * steps[k], c * w / steps[k])
                     for direction, c in axes for j, w in _STENCIL]
                    for k in subset]
            total = 0j
            for choice in itertools.product(*legs):
                point, weight = list(z), 1
                for k, (shift, w) in zip(subset, choice):
                    point[k] += shift
                    weight *= w
                total += weight * evaluate(point)
            derivatives[subset] = total
    log.debug('stencil_derivatives: %d sites, steps %s', len(z), steps)
    return derivatives


def apply_monodromy_entry(entry, f, z, h=None, rel_step=1e-3,
                          singularities=(), antiholomorphic=False,
                          derivatives=None):
    """``(E f)(z)`` for a monodromy entry ``E`` acting on the sites.

    The entry is the sum over index paths of products of single-site
    operators ``c + e d``; each product expands into ``sum_S prod c prod e
    D_S f``.

    Keyword Args:
        derivatives (dict): Output of :func:`stencil_derivatives`, reused
            across spectral parameters.

    Raises:
        StencilError: As :func:`stencil_derivatives`.
    """
    z = [complex(v) for v in z]
    if len(z) != entry.N:
        raise ValueError('apply_monodromy_entry: {}_{} acts on {} sites, got '
                         '{}'.format(entry.which, entry.N, entry.N, len(z)))
    if derivatives is None:
        derivatives = stencil_derivatives(f, z, h, rel_step, singularities,
                                          antiholomorphic)
    if antiholomorphic:
        u, s, sites = entry.u_bar, entry.spin.s_bar, [v.conjugate()
                                                      for v in z]
    else:
        u, s, sites = entry.u, entry.spin.s, z
    end = 0 if entry.which == 'A' else 1
    total = 0j
    for path in _paths(entry.N, end):
        factors = [_site_entry(path[k], path[k + 1], u, s, sites[k])
                   for k in range(entry.N)]
        for subset, value in derivatives.items():
            term = value
            for k, (c, e) in enumerate(factors):
                term *= e if k in subset else c
            total += term
    return total


def eigen_residuals(cfg, which, x, z, us, p=None, target_rel_error=1e-10,
                    h=None, rel_step=1e-3, antiholomorphic=False,
                    budget=DEFAULT_BUDGET):
    """Relative residuals of the eigen-equation at spectral points ``us``.

    ``|(E(u) - lambda(u)) Psi|/|lambda(u) Psi|`` with ``Psi = Psi_A(x|z)``
    for ``which = 'A'`` and ``Psi_B(p, x|z)`` for ``'B'``.
    """
    if which == 'A':
        def f(point):
            return psi_A(cfg, x, point, 0j, target_rel_error, budget)
        singularities = [0j]
    else:
        def f(point):
            return psi_B(cfg, p, x, point, target_rel_error, budget)
        singularities = []
    derivatives = stencil_derivatives(f, z, h, rel_step, singularities,
                                      antiholomorphic)
    residuals = []
    for u in us:
        entry = MonodromyEntry(which, cfg.N, u, spin=cfg.spin)
        applied = apply_monodromy_entry(entry, f, z, derivatives=derivatives,
                                        antiholomorphic=antiholomorphic)
        expected = (entry.eigenvalue(x, p, antiholomorphic) *
                    derivatives[()])
        residuals.append(abs(applied - expected) / abs(expected))
    log.info('eigen_residuals: %s_%d, worst %.2e', which, cfg.N,
             max(residuals))
    return residuals


# Matrix elements
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

class MatrixElement(namedtuple('MatrixElement', [
        'numeric', 'closed', 'rel_dev', 'error_estimate', 'converged',
        'evaluations'])):

    """A matrix element by quadrature next to its closed form.

    ``error_estimate`` is the quadrature error relative to the closed form.
    """

    __slots__ = ()

    @classmethod
    def from_estimate(cls, estimate, closed):
        scale = max(abs(closed), 1e-300)
        return cls(estimate.value, complex(closed),
                   rel_dev(estimate.value, closed),
                   estimate.abs_error_estimate / scale, estimate.converged,
                   estimate.evaluations)

    def against(self, closed):
        """The same numeric value compared with another closed form."""
        scale = max(abs(closed), 1e-300)
        error = self.error_estimate * max(abs(self.closed), 1e-300) / scale
        return self._replace(closed=complex(closed),
                             rel_dev=rel_dev(self.numeric, closed),
                             error_estimate=error)

    def report(self, case_id, identity, target, **kwargs):
        return Report.compare(case_id, identity, ANCHORS[identity],
                              self.numeric, self.closed, target,
                              error_estimate=self.error_estimate,
                              converged=self.converged,
                              evaluations=self.evaluations, **kwargs)


def shift_element_diagram(N, z0):
    """The diagram of ``int d^2z conj(Psi_A(x'|z)) Psi_A(x|z - z0)``.

    The ket depends on ``s`` and ``x1 ..``; the bra lines use ``1 - s`` and
    ``-xp1 ..``, which conjugates them when ``xp`` carries the conjugated
    offset. Only the ket normalizations are in the prefactor.
    """
    sites = _names('z', N)
    s = _param('s')
    ket_vertices, ket_edges, normalization = _psi_a_edges(
        s, [_param(x) for x in _names('x', N)], sites, ORIGIN, 'w')
    bra_vertices, bra_edges, _ = _psi_a_edges(
        1 - s, [-_param(x) for x in _names('xp', N)], sites, BRA_ORIGIN, 'v')
    return Diagram({ORIGIN: z0, BRA_ORIGIN: 0j},
                   ket_vertices + bra_vertices + sites,
                   ket_edges + bra_edges, normalization)


def _lines_in_order(d, vertex, neighbours):
    """Move the lines at ``vertex`` to the end, ordered by neighbour."""
    def other(e):
        return e.head if e.tail == vertex else e.tail

    at = [e for e in d.edges if vertex in (e.tail, e.head)]
    rest = [e for e in d.edges if vertex not in (e.tail, e.head)]
    at.sort(key=lambda e: neighbours.index(other(e)))
    return d._replace(edges=tuple(rest + at))


def reduce_shift_element(d):
    """Rewrite the ``N = 2`` shift-element diagram down to two vertices.

    The parallel lines between the sites cancel, the chain relation removes
    ``z1``, the cross relation at ``z2`` exchanges the ket and bra indices
    and a second chain removes ``w1``. The inner vertex of the result is
    the bra vertex ``v1``.
    """
    d = rewrite_chain(d.merged(), 'z1')
    d = _lines_in_order(d.merged(), 'z2', ['w1', 'v1', ORIGIN, BRA_ORIGIN])
    d = rewrite_cross(d, 'z2')
    d = rewrite_chain(d.merged(), 'w1')
    return d.merged()._replace(vertices=('v1', 'z2'))


def _bra_normalization(cfg, xp):
    """``conj(r_N(x'))`` for the bra layers, ``xp`` offset below the axis."""
    value = complex(1)
    for k, v in zip(range(cfg.N, 1, -1), xp):
        value *= complex(layer_normalization(k).evaluate(
            {'x': v.conjugate(), 's': cfg.spin})).conjugate()
    return value


def matrix_element_T(cfg, x, xp, z0, target_rel_error=1e-7,
                     budget=DEFAULT_BUDGET):
    """The shift operator between ``Psi_A`` states, numeric and closed.

    Ket points get the offset ``+regularization``, bra points
    ``-regularization``. At ``N = 2`` the eight-dimensional integral is
    reduced by :func:`reduce_shift_element` before quadrature.

    Raises:
        PlanError: For ``N = 3``.
        ValueError: At ``z0 = 0``.
    """
    z0 = complex(z0)
    if z0 == 0:
        raise ValueError('matrix_element_T: the shift z0 must be nonzero')
    if cfg.N > 2:
        raise PlanError('matrix_element_T: quadrature is available up to '
                        'N = 2')
    ket, bra = cfg.ket(x), cfg.bra(xp)
    if len(ket) != cfg.N or len(bra) != cfg.N:
        raise ValueError('matrix_element_T: expected {} variables on each '
                         'side'.format(cfg.N))
    d = shift_element_diagram(cfg.N, z0)
    if cfg.N == 2:
        d = reduce_shift_element(d)
    values = _values(cfg, ket)
    values.update(zip(_names('xp', cfg.N), bra))
    start = time.perf_counter()
    estimate = eval_diagram(d, target_rel_error, values=values,
                            budget=budget)
    estimate = estimate.scaled(_bra_normalization(cfg, bra))
    closed = txx_closed_form(_names('x', cfg.N), _names('xp', cfg.N)).evaluate(
        values, bases={'z0': z0})
    log.info('matrix_element_T: N = %d, %d evaluations in %.1f s', cfg.N,
             estimate.evaluations, time.perf_counter() - start)
    return MatrixElement.from_estimate(estimate, closed)


def shift_element_closed(cfg, x, xp, z0):
    """The closed form of the shift element at zero offset."""
    values = _values(cfg, [_separated(v).with_offset(0) for v in x])
    values.update(zip(_names('xp', cfg.N),
                      (_separated(v).with_offset(0) for v in xp)))
    return txx_closed_form(_names('x', cfg.N), _names('xp', cfg.N)).evaluate(
        values, bases={'z0': complex(z0)})


def ba_element_diagram(w=1 + 0j):
    """The sites integral of ``<Psi_B(p, u)|Psi_A(x)>`` at ``N = 2``.

    ``G(w) = int d^2z1 d^2z2 conj(L(z|w)) Psi_A(x|z)`` with ``L`` the layer
    of ``Psi_B`` at its integration point ``w``. The ket depends on ``s``,
    ``x1`` and ``x2``; the bra lines use ``1 - s`` and ``-u1`` as in
    :func:`shift_element_diagram`. Only the ket normalization is in the
    prefactor.
    """
    sites = _names('z', 2)
    s, u = _param('s'), -_param('u1')
    ket_vertices, ket_edges, normalization = _psi_a_edges(
        s, [_param(x) for x in _names('x', 2)], sites, ORIGIN, 'v')
    bra_edges = [Edge('z2', 'z1', 2 * (1 - s) - 1),
                 Edge('z1', BRA_POINT, s - I * u),
                 Edge('z2', BRA_POINT, s + I * u)]
    return Diagram({ORIGIN: 0j, BRA_POINT: w}, ket_vertices + sites,
                   ket_edges + bra_edges, normalization)


def reduce_ba_element(d):
    """Rewrite :func:`ba_element_diagram` down to two vertices.

    The parallel lines between the sites cancel and the chain relation
    removes ``z1``. The inner vertex of the result is ``z2``.
    """
    d = rewrite_chain(d.merged(), 'z1')
    return d.merged()._replace(vertices=('z2', 'v1'))


def matrix_element_BA(cfg, p, u, x, target_rel_error=1e-9,
                      budget=DEFAULT_BUDGET):
    """``<Psi_B(p, u)|Psi_A(x)>``, numeric and closed.

    At ``N = 1`` the integral is the Fourier transform of ``[z]^(ix-s)``.
    At ``N = 2`` the sites integral ``G(w)`` of :func:`ba_element_diagram`
    scales as ``[w]^(1 - 2s + i(x1 + x2))``, so one two-vertex quadrature
    at ``w = 1`` and the Fourier relation in ``w`` give the element.

    Raises:
        PlanError: For ``N = 3``, or at ``p = 0``.
    """
    p = complex(p)
    if cfg.N > 2:
        raise PlanError('matrix_element_BA: quadrature is available up to '
                        'N = 2')
    if len(u) != cfg.N - 1:
        raise ValueError('matrix_element_BA: N = {} takes {} u-variables, '
                         'got {}'.format(cfg.N, cfg.N - 1, len(u)))
    if p == 0:
        raise PlanError('matrix_element_BA: momentum must be nonzero')
    ket = cfg.ket(x)
    values = _values(cfg, ket)
    if cfg.N == 1:
        alpha = cfg.spin.index - ket[0].times_i()
        estimate = fourier_transform(alpha, -p, target_rel_error, budget)
        closed = ba_closed_form([], ['x1']).evaluate(values, bases={'p': p})
        return MatrixElement.from_estimate(estimate, closed)
    bra = cfg.bra(u)
    values['u1'] = bra[0]
    start = time.perf_counter()
    estimate = eval_diagram(reduce_ba_element(ba_element_diagram()),
                            target_rel_error, values=values, budget=budget)
    s = cfg.spin.index
    alpha = s + s - 1 - ket[0].times_i() - ket[1].times_i()
    estimate = estimate.scaled(abs(p) * _bra_normalization(cfg, bra) *
                               fourier_closed_form(alpha, -p))
    closed = ba_closed_form(['u1'], ['x1', 'x2']).evaluate(
        values, bases={'p': p})
    log.info('matrix_element_BA: N = 2, %d evaluations in %.1f s',
             estimate.evaluations, time.perf_counter() - start)
    return MatrixElement.from_estimate(estimate, closed)


# Group action
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def group_action(g, phi, spin):
    """``[T_g phi](z) = [a - cz]^(-2s) phi((dz - b)/(a - cz))``.

    Args:
        g: The matrix ``((a, b), (c, d))`` with ``ad - bc = 1``.
        phi (Callable): Vectorized function of ``z``.
        spin (Spin): The representation.

    Raises:
        ValueError: If ``det g != 1``.
    """
    (a, b), (c, d) = np.asarray(g, dtype=complex)
    det = a * d - b * c
    if abs(det - 1) > 1e-12:
        raise ValueError('invalid group element: det g = {} != 1'.format(det))
    spin = _spin(spin)
    weight = BiIndex(-2 * spin.s, -2 * spin.s_bar, n=-2 * spin.n_s)

    def transformed(z):
        z = np.asarray(z, dtype=complex)
        denominator = a - c * z
        return power_bi(denominator, weight) * phi((d * z - b) / denominator)
    return transformed


def inner_product(phi, psi, decay=4.0, target_rel_error=1e-9, scale=3.0,
                  budget=DEFAULT_BUDGET):
    """``<phi|psi> = int d^2z conj(phi) psi`` for smooth decaying functions.
    """
    plan = QuadPlan((), decay_at_infinity=decay,
                    target_rel_error=target_rel_error, max_evaluations=budget,
                    scale=scale)
    return integrate_plane(lambda z: np.conj(phi(z)) * psi(z), plan)


def check_unitarity(g, phi, psi, spin, target=1e-6, case_id='unitarity',
                    budget=DEFAULT_BUDGET):
    """Compare ``<T_g phi|T_g psi>`` with ``<phi|psi>``.

    ``phi`` and ``psi`` must be localized (Gaussian decay); the transformed
    pair decays like ``|z|^-4``.
    """
    start = time.perf_counter()
    lhs = inner_product(group_action(g, phi, spin),
                        group_action(g, psi, spin), decay=4.0,
                        target_rel_error=target / 20, budget=budget)
    rhs = inner_product(phi, psi, decay=6.0, target_rel_error=target / 20,
                        budget=budget)
    error = ((lhs.abs_error_estimate + rhs.abs_error_estimate) /
             max(abs(rhs.value), 1e-300))
    return Report.compare(
        case_id, 'unitarity', ANCHORS['unitarity'], lhs.value, rhs.value,
        target, error_estimate=error,
        converged=lhs.converged and rhs.converged,
        evaluations=lhs.evaluations + rhs.evaluations,
        wall_ms=int(1000 * (time.perf_counter() - start)),
        details={'g': np.asarray(g, dtype=complex), 'spin': _spin(spin)})


# Completeness at N = 1
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def smeared_window(delta, width):
    """``exp(-delta^2 / 2 width^2) / (sqrt(2 pi) width)``."""
    return (math.exp(-delta ** 2 / (2 * width ** 2)) /
            (math.sqrt(2 * math.pi) * width))


def smeared_orthogonality(cfg, x, xp, width=1.0, target_rel_error=1e-7,
                          budget=DEFAULT_BUDGET):
    """``int d^2z conj(Psi_A(x'|z)) Psi_A(x|z)`` smeared over ``nu``.

    A Gaussian of width ``width`` in ``nu - nu'`` turns the delta function
    into ``exp(-2 width^2 ln^2 |z|)`` under the integral; the result is
    compared with ``2 pi^2 delta_(n n') W(nu - nu')``. ``x`` and ``xp`` must
    lie on the real axis.

    Returns:
        MatrixElement
    """
    if cfg.N != 1:
        raise PlanError('smeared_orthogonality: available at N = 1 only')
    x, xp = _separated(x), _separated(xp)
    if x.offset or xp.offset:
        raise ValueError('smeared_orthogonality: nu must be real')
    s = cfg.spin.index
    ket, bra = x.times_i() - s, xp.times_i() - s
    peak = 2 * math.pi ** 2 * smeared_window(0.0, width)
    plan = QuadPlan([Singularity(0j, 1.5)], decay_at_infinity=3.5,
                    target_rel_error=target_rel_error, max_evaluations=budget,
                    abs_floor=target_rel_error * peak)

    def f(z):
        log_r = np.log(np.abs(z))
        return (np.conj(power_bi(z, bra)) * power_bi(z, ket) *
                np.exp(-2 * width ** 2 * log_r ** 2))

    estimate = integrate_plane(f, plan)
    closed = (2 * math.pi ** 2 * smeared_window((x.nu - xp.nu).real, width)
              if x.n == xp.n else 0.0)
    return MatrixElement.from_estimate(estimate, closed)


def completeness_B(z, w, sigma=1.0, target_rel_error=1e-8,
                   budget=DEFAULT_BUDGET):
    """``int d^2p mu_B Psi_B(p|z) conj(Psi_B(p|w)) exp(-sigma^2 |p|^2)``
    against ``exp(-|z - w|^2/sigma^2)/(pi sigma^2)``, the smeared delta
    function.

    Returns:
        MatrixElement
    """
    z, w = complex(z), complex(w)
    mu = measure_B(1, [])
    plan = QuadPlan((), decay_at_infinity=6.0,
                    target_rel_error=target_rel_error, max_evaluations=budget,
                    scale=3.0 / sigma)

    def f(p):
        p = np.asarray(p, dtype=complex)
        return (mu * np.exp(2j * (p * (z - w)).real) *
                np.exp(-sigma ** 2 * np.abs(p) ** 2))

    estimate = integrate_plane(f, plan)
    closed = math.exp(-abs(z - w) ** 2 / sigma ** 2) / (math.pi * sigma ** 2)
    log.debug('completeness_B: value %s', estimate.value)
    return MatrixElement.from_estimate(estimate, closed)


# Regularization sweep
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def richardson(values):
    """Extrapolate values at offsets ``h, h/2, h/4`` to zero offset.

    The first pass removes the linear term and the second the quadratic.

    >>> abs(richardson([1 + 0.1 + 0.01, 1 + 0.05 + 0.0025,
    ...                 1 + 0.025 + 0.000625]) - 1) < 1e-15
    True
    """
    f1, f2, f4 = values
    first = 2 * f2 - f1
    second = 2 * f4 - f2
    return (4 * second - first) / 3


def regularization_sweep(cfg, x, xp, z0, offsets=REGULARIZATION_SWEEP,
                         target=1e-3, target_rel_error=1e-8,
                         case_id='sweep', budget=DEFAULT_BUDGET):
    """The shift matrix element at decreasing offsets, extrapolated to zero.

    The numeric values at ``offsets`` are Richardson-extrapolated and
    compared with the closed form at zero offset.

    Raises:
        ValueError: Unless the offsets halve from one to the next.
    """
    if len(offsets) != 3 or any(
            abs(a - 2 * b) > 1e-12 for a, b in zip(offsets, offsets[1:])):
        raise ValueError('regularization_sweep: need three halving offsets, '
                         'got {}'.format(offsets))
    start = time.perf_counter()
    elements = [matrix_element_T(cfg._replace(regularization=eps), x, xp, z0,
                                 target_rel_error, budget)
                for eps in offsets]
    extrapolated = richardson([e.numeric for e in elements])
    closed = shift_element_closed(cfg, x, xp, z0)
    error = sum(e.error_estimate for e in elements)
    details = {'offsets': list(offsets),
               'numeric': [e.numeric for e in elements],
               'closed': [e.closed for e in elements]}
    log.info('regularization_sweep: deviations %s',
             ['{:.2e}'.format(rel_dev(e.numeric, closed)) for e in elements])
    return Report.compare(
        case_id, 'txx', ANCHORS['txx'], extrapolated, closed, target,
        error_estimate=error, converged=all(e.converged for e in elements),
        evaluations=sum(e.evaluations for e in elements),
        wall_ms=int(1000 * (time.perf_counter() - start)), details=details)
