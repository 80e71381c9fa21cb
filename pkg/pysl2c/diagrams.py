#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# diagrams.py

"""
Two-dimensional Feynman diagrams and their rewrite rules.

A diagram is a directed multigraph whose nodes are named external points and
internal vertices. An edge ``tail -> head`` with index ``a`` stands for the
propagator ``[head - tail]^-a``; every internal vertex ``w`` is integrated
over the plane with ``d^2w``. The product of propagators is multiplied by an
exact :class:`~pysl2c.symalg.AFactorProduct` prefactor.

Reversing an edge multiplies the propagator by ``(-1)^[a]``. Rewrites read
the edges at a vertex either in *out-form* ``[P - w]^-a`` or in *in-form*
``[w - P]^-a`` and put the reversal sign into the prefactor, so the indices
themselves never change.
"""

import logging
import math
import time
from collections import namedtuple

import networkx as nx
import numpy as np

from .exceptions import (ConstraintError, NonConvergence, PatternError,
                         PlanError)
from .planequad import (DEFAULT_BUDGET, IntegralEstimate, QuadPlan,
                        Singularity, integrate_plane,
                        integrate_radial_oscillatory)
from .report import Report
from .serialize import serializable
from .specfun import BiIndex, a_product, power_bi
from .symalg import AFactorProduct, as_expr, bind, canonicalize
from .utils import i_power

log = logging.getLogger(__name__)

# Default positions of external points used by the relation checks.
POINTS = {
    'z1': 0.3 + 0.2j,
    'z2': -0.5 + 0.1j,
    'z3': 0.1 - 0.6j,
    'z4': 0.7 - 0.4j,
}

ANCHORS = {
    'chain': 'chain relation: int [z1-w]^-a [w-z2]^-b = '
             'pi (-1)^[g] a(a,b,g) [z1-z2]^(1-a-b), g = 2-a-b',
    'star': 'star-triangle relation: int prod [zk-w]^-ak = pi a(a1,a2,a3) / '
            '([z2-z1]^(1-a3) [z1-z3]^(1-a2) [z3-z2]^(1-a1)), sum ak = 2',
    'cross': 'cross relation: [z1-z2]^(a-a\') a(a\') a(bbar\') I(a, 1-a\', '
             'b, 1-b\') = [z3-z4]^(b\'-b) a(a) a(bbar) I(a\', 1-a, b\', 1-b)',
    'fourier': 'Fourier transform of the propagator: int exp(i(pz+c.c.)) '
               '[z]^-a = pi i^[a] a(a) [p]^(a-1)',
}
RELATIONS = tuple(ANCHORS)
_POINT_NAMES = {'chain': ('z1', 'z2'), 'star': ('z1', 'z2', 'z3'),
                'cross': ('z1', 'z2', 'z3', 'z4'), 'fourier': ()}


class Edge(namedtuple('Edge', ['tail', 'head', 'index'])):

    """The propagator ``[head - tail]^-index``."""

    __slots__ = ()

    def __new__(cls, tail, head, index):
        return super().__new__(cls, tail, head, as_expr(index))

    def reversed(self):
        return Edge(self.head, self.tail, self.index)

    def serializable(self):
        return {'tail': self.tail, 'head': self.head,
                'index': self.index.serializable()}


def _point(value):
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


class Diagram(namedtuple('Diagram', ['points', 'vertices', 'edges',
                                     'prefactor'])):

    """An immutable diagram.

    Args:
        points (dict | Iterable): External point names and positions.
        vertices (Iterable(str)): Internal vertex names, in integration
            order (the first vertex is the innermost).
        edges (Iterable): :class:`Edge` objects or ``(tail, head, index)``
            triples; indices may be symbolic.

    Keyword Args:
        prefactor (AFactorProduct): Exact prefactor. Defaults to 1.

    Raises:
        ValueError: If an edge has an unknown endpoint or is a loop, or a
            name is used twice.
    """

    __slots__ = ()

    def __new__(cls, points, vertices, edges, prefactor=None):
        items = points.items() if isinstance(points, dict) else points
        points = tuple((name, _point(z)) for name, z in items)
        vertices = tuple(vertices)
        edges = tuple(e if isinstance(e, Edge) else Edge(*e) for e in edges)
        names = [name for name, _ in points] + list(vertices)
        if len(set(names)) != len(names):
            raise ValueError('invalid diagram: repeated node name in '
                             '{}'.format(names))
        for e in edges:
            for end in (e.tail, e.head):
                if end not in names:
                    raise ValueError('invalid diagram: edge {} -> {} has an '
                                     'unknown endpoint'.format(e.tail,
                                                               e.head))
            if e.tail == e.head:
                raise ValueError('invalid diagram: loop at `{}`'.format(
                    e.tail))
        prefactor = AFactorProduct() if prefactor is None else prefactor
        return super().__new__(cls, points, vertices, edges, prefactor)

    @property
    def positions(self):
        return dict(self.points)

    @property
    def external_points(self):
        return tuple(name for name, _ in self.points)

    @property
    def internal_vertices(self):
        return self.vertices

    @property
    def graph(self):
        """A frozen ``MultiDiGraph``; edge keys are positions in ``edges``."""
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.external_points, internal=False)
        g.add_nodes_from(self.vertices, internal=True)
        for k, e in enumerate(self.edges):
            g.add_edge(e.tail, e.head, key=k, index=e.index)
        return nx.freeze(g)

    def incident(self, vertex):
        """Positions of the edges at ``vertex``, in edge order."""
        g = self.graph
        keys = [k for _, _, k in g.in_edges(vertex, keys=True)]
        keys += [k for _, _, k in g.out_edges(vertex, keys=True)]
        return sorted(keys)

    def rank(self, name):
        """Node order of the normal form: sorted points, then vertices."""
        order = sorted(self.external_points) + list(self.vertices)
        return order.index(name)

    def flip_edge(self, k):
        """Reverse edge ``k``, compensating with ``(-1)^[index]``."""
        e = self.edges[k]
        edges = list(self.edges)
        edges[k] = e.reversed()
        prefactor = self.prefactor * AFactorProduct(sign_power=e.index)
        return self._replace(edges=tuple(edges), prefactor=prefactor)

    def merged(self):
        """Join parallel lines: ``[u]^-a [u]^-b = [u]^-(a + b)``.

        Lines between the same two nodes take the orientation of the first
        of them; lines whose joint index vanishes are dropped.
        """
        d, slots, order = self, {}, []
        for k, e in enumerate(self.edges):
            pair = frozenset((e.tail, e.head))
            if pair not in slots:
                slots[pair] = (e.tail, e.head)
                order.append(pair)
            elif slots[pair] != (e.tail, e.head):
                d = d.flip_edge(k)
        totals = {}
        for e in d.edges:
            pair = frozenset((e.tail, e.head))
            totals[pair] = totals.get(pair, as_expr(0)) + e.index
        edges = [Edge(*slots[pair], totals[pair]) for pair in order
                 if not totals[pair].is_zero()]
        return d._replace(edges=tuple(edges))

    def normalized(self):
        """Orient every edge from lower to higher node rank and sort edges.

        The prefactor is brought to canonical form, so diagrams that are
        equal up to orientation and prefactor bookkeeping compare equal.
        """
        d = self
        for k, e in enumerate(self.edges):
            if self.rank(e.tail) > self.rank(e.head):
                d = d.flip_edge(k)
        edges = sorted(d.edges, key=lambda e: (self.rank(e.tail),
                                               self.rank(e.head),
                                               e.index.key()))
        return d._replace(points=tuple(sorted(self.points)),
                          edges=tuple(edges),
                          prefactor=canonicalize(d.prefactor))

    def params(self):
        return set().union(self.prefactor.params(),
                           *(e.index.params() for e in self.edges))

    def serializable(self):
        return {
            'points': {name: z for name, z in self.points},
            'vertices': list(self.vertices),
            'edges': [e.serializable() for e in self.edges],
            'prefactor': self.prefactor.serializable(),
        }

    @classmethod
    def from_dict(cls, d):
        prefactor = d.get('prefactor')
        return cls(d['points'], d.get('vertices', []),
                   [Edge(e['tail'], e['head'], e['index'])
                    for e in d.get('edges', [])],
                   AFactorProduct.from_dict(prefactor) if prefactor else None)


# Numeric evaluation
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def _numeric_edges(d, values):
    bindings = bind(values or {})
    return [(e.tail, e.head, e.index.evaluate(bindings)) for e in d.edges]


def _propagator(head, tail, idx):
    return power_bi(head - tail, -idx)


def _vertex_integrand(edges, vertex, positions):
    """``f(z)``: the product of the edges at ``vertex`` with ``vertex = z``.

    Every other endpoint must have a position.
    """
    factors = [(positions[head], idx, True) if tail == vertex
               else (positions[tail], idx, False)
               for tail, head, idx in edges]

    def f(z):
        value = np.ones(np.shape(z), dtype=complex)
        for other, idx, outgoing in factors:
            value = value * (_propagator(other, z, idx) if outgoing
                             else _propagator(z, other, idx))
        return value
    return f


def _strengths(edges, vertex):
    """Summed indices per neighbour and the total index at ``vertex``."""
    strengths, total = {}, BiIndex(0)
    for tail, head, idx in edges:
        other = head if tail == vertex else tail
        strengths[other] = strengths.get(other, BiIndex(0)) + idx
        total = total + idx
    return strengths, total


def check_window(d, values=None):
    """Check integrability and decay at every internal vertex.

    At each vertex every neighbour must contribute ``Re(a + a_bar) < 2`` and
    the incident indices must sum to more than 2.

    Raises:
        PlanError: Naming the offending vertex.
    """
    edges = _numeric_edges(d, values)
    for vertex in d.vertices:
        at = [e for e in edges if vertex in e[:2]]
        if not at:
            raise PlanError('invalid diagram: vertex `{}` has no edges and '
                            'its integral diverges'.format(vertex))
        strengths, total = _strengths(at, vertex)
        for other, idx in strengths.items():
            if idx.total.real >= 2:
                raise PlanError('vertex `{}`: lines to `{}` with Re(a + '
                                'a_bar) = {} are not integrable'.format(
                                    vertex, other, idx.total.real))
        if total.total.real <= 2:
            raise PlanError('vertex `{}`: indices sum to Re(a + a_bar) = {} '
                            '<= 2, no decay at infinity'.format(
                                vertex, total.total.real))


def _plan(singularities, decay, target_rel_error, budget, vertex):
    try:
        return QuadPlan(singularities, decay_at_infinity=decay,
                        target_rel_error=target_rel_error,
                        max_evaluations=budget)
    except PlanError as e:
        raise PlanError('vertex `{}`: {}'.format(vertex, e)) from e


def _integrate(f, plan, vertex):
    try:
        return integrate_plane(f, plan)
    except NonConvergence as e:
        raise NonConvergence('vertex `{}`: {}'.format(vertex, e),
                             estimate=e.estimate) from e


def _constant_part(edges, positions):
    value = 1 + 0j
    for tail, head, idx in edges:
        value *= _propagator(positions[head], positions[tail], idx)
    return value


def _one_vertex(edges, vertex, positions, target_rel_error, budget):
    at = [e for e in edges if vertex in e[:2]]
    strengths, total = _strengths(at, vertex)
    plan = _plan([Singularity(positions[p], idx)
                  for p, idx in strengths.items()], total, target_rel_error,
                 budget, vertex)
    return _integrate(_vertex_integrand(at, vertex, positions), plan, vertex)


def _two_vertices(edges, inner, outer, positions, target_rel_error, budget):
    """Integrate ``inner`` for every quadrature node of ``outer``."""
    at_inner = [e for e in edges if inner in e[:2]]
    at_outer = [e for e in edges if outer in e[:2] and inner not in e[:2]]
    inner_strengths, inner_total = _strengths(at_inner, inner)
    outer_strengths, outer_total = _strengths(at_outer, outer)
    link = inner_strengths.get(outer, BiIndex(0)).total.real
    # Effective power at each neighbour of the outer vertex: its own lines
    # plus what the inner integral produces when the outer vertex meets a
    # neighbour of the inner one.
    sigmas = {p: idx.total.real for p, idx in outer_strengths.items()}
    for p, idx in inner_strengths.items():
        if p == outer:
            continue
        chained = idx.total.real + link - 2
        sigmas[p] = sigmas.get(p, 0.0) + max(chained, 0.0)
    decay = outer_total.total.real + min(link, inner_total.total.real - 2)
    outer_plan = _plan([Singularity(positions[p], sigma)
                        for p, sigma in sigmas.items()], decay,
                       target_rel_error, budget, outer)
    inner_target = target_rel_error / 10
    direct = _vertex_integrand(at_outer, outer, positions)
    inner_locations = [p for p in inner_strengths if p != outer]
    stats = {'evaluations': 0, 'error': 0.0, 'inner_failed': False}

    def integrand(v):
        v = np.asarray(v, dtype=complex)
        values = np.empty(v.shape, dtype=complex)
        for i, point in enumerate(v.ravel()):
            local = dict(positions)
            local[outer] = point
            singularities = [Singularity(local[p], inner_strengths[p])
                             for p in inner_locations]
            if outer in inner_strengths:
                singularities.append(Singularity(point,
                                                 inner_strengths[outer]))
            plan = _plan(singularities, inner_total, inner_target, budget,
                         inner)
            try:
                result = _integrate(
                    _vertex_integrand(at_inner, inner, local), plan, inner)
            except NonConvergence:
                stats['inner_failed'] = True
                raise
            stats['evaluations'] += result.evaluations
            stats['error'] = max(stats['error'],
                                 result.abs_error_estimate /
                                 max(abs(result.value), 1e-300))
            values.flat[i] = result.value
        return values * direct(v)

    try:
        estimate = integrate_plane(integrand, outer_plan)
    except NonConvergence as e:
        if stats['inner_failed']:
            raise
        raise NonConvergence('vertex `{}`: {}'.format(outer, e),
                             estimate=e.estimate) from e
    error = (estimate.abs_error_estimate +
             stats['error'] * abs(estimate.value))
    return IntegralEstimate(estimate.value, error,
                            estimate.evaluations + stats['evaluations'],
                            estimate.converged)


def eval_diagram(d, target_rel_error=1e-8, values=None,
                 budget=DEFAULT_BUDGET):
    """Evaluate a diagram with at most two internal vertices.

    Args:
        d (Diagram): The diagram.

    Keyword Args:
        target_rel_error (float): Relative target of the quadrature.
        values (dict): Parameter assignment for symbolic indices.
        budget (int): Evaluation budget of each plane integral.

    Returns:
        IntegralEstimate: The integral times the prefactor.

    Raises:
        PlanError: If a vertex is outside its convergence window.
        NonConvergence: If a quadrature runs out of budget; the message
            names the vertex.
    """
    if len(d.vertices) > 2:
        raise PlanError('invalid diagram: {} internal vertices, rewrite it '
                        'down to at most 2 first'.format(len(d.vertices)))
    check_window(d, values)
    edges = _numeric_edges(d, values)
    positions = d.positions
    internal = set(d.vertices)
    free = [e for e in edges if not internal & set(e[:2])]
    constant = _constant_part(free, positions)
    factor = constant * d.prefactor.evaluate(values or {}, bases=positions)
    if not d.vertices:
        estimate = IntegralEstimate(1 + 0j, 0.0, 0, True)
    elif len(d.vertices) == 1:
        estimate = _one_vertex(edges, d.vertices[0], positions,
                               target_rel_error, budget)
    else:
        estimate = _two_vertices(edges, d.vertices[0], d.vertices[1],
                                 positions, target_rel_error, budget)
    log.debug('eval_diagram: %d vertices, integral %s, %d evaluations',
              len(d.vertices), estimate.value, estimate.evaluations)
    return estimate.scaled(factor)


# Rewrite rules
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def _out_form(e, vertex):
    """``(P, a, sign)`` with ``edge = (-1)^[sign] [P - vertex]^-a``."""
    if e.tail == vertex:
        return e.head, e.index, None
    return e.tail, e.index, e.index


def _in_form(e, vertex):
    """``(P, a, sign)`` with ``edge = (-1)^[sign] [vertex - P]^-a``."""
    if e.head == vertex:
        return e.tail, e.index, None
    return e.head, e.index, e.index


def _signs(*signs):
    return sum((s for s in signs if s is not None), as_expr(0))


def _pattern(d, vertex, degree, rule):
    if vertex not in d.vertices:
        raise PatternError('{}: `{}` is not an internal vertex'.format(
            rule, vertex))
    keys = d.incident(vertex)
    if len(keys) != degree:
        raise PatternError('{}: vertex `{}` has degree {}, expected '
                           '{}'.format(rule, vertex, len(keys), degree))
    others = [d.edges[k].head if d.edges[k].tail == vertex
              else d.edges[k].tail for k in keys]
    if len(set(others)) != degree:
        raise PatternError('{}: vertex `{}` has parallel lines to the same '
                           'node'.format(rule, vertex))
    return keys


def _replace(d, vertex, removed, added, factor):
    edges = [e for k, e in enumerate(d.edges) if k not in removed]
    edges += [e for e in added if not e.index.is_zero()]
    vertices = [v for v in d.vertices if v != vertex]
    return Diagram(d.points, vertices, edges, d.prefactor * factor)


def rewrite_chain(d, vertex):
    """Integrate out a vertex of degree two.

    ``int [z1 - w]^-a [w - z2]^-b = pi (-1)^[g] a(a, b, g) [z1 - z2]^(1-a-b)``
    with ``g = 2 - a - b``. The new line ``z2 -> z1`` of index ``a + b - 1``
    is omitted when that index vanishes.

    Raises:
        PatternError: If the vertex does not have exactly two lines to two
            distinct nodes.
    """
    keys = _pattern(d, vertex, 2, 'rewrite_chain')
    first, second = (d.edges[k] for k in keys)
    p1, alpha, s1 = _out_form(first, vertex)
    p2, beta, s2 = _in_form(second, vertex)
    gamma = 2 - alpha - beta
    factor = AFactorProduct(numerator=[alpha, beta, gamma],
                            sign_power=_signs(gamma, s1, s2), pi_power=1)
    return _replace(d, vertex, keys, [Edge(p2, p1, alpha + beta - 1)],
                    factor)


def rewrite_star_triangle(d, vertex):
    """Replace a unique vertex of degree three by a triangle.

    With the lines in out-form ``[zk - w]^-ak`` and ``a1 + a2 + a3 = 2``
    exactly in both slots, the vertex becomes ``pi a(a1, a2, a3)`` times
    ``[z2 - z1]^(a3-1) [z1 - z3]^(a2-1) [z3 - z2]^(a1-1)``.

    Raises:
        PatternError: On the wrong degree.
        ConstraintError: If the indices do not sum to 2.
    """
    keys = _pattern(d, vertex, 3, 'rewrite_star_triangle')
    (z1, alpha, s1), (z2, beta, s2), (z3, gamma, s3) = (
        _out_form(d.edges[k], vertex) for k in keys)
    excess = alpha + beta + gamma - 2
    if not excess.is_zero():
        raise ConstraintError('rewrite_star_triangle: indices at `{}` sum to '
                              '2 + {}, not 2'.format(vertex, excess))
    factor = AFactorProduct(numerator=[alpha, beta, gamma],
                            sign_power=_signs(s1, s2, s3), pi_power=1)
    triangle = [Edge(z1, z2, 1 - gamma), Edge(z3, z1, 1 - beta),
                Edge(z2, z3, 1 - alpha)]
    return _replace(d, vertex, keys, triangle, factor)


def rewrite_cross(d, vertex, new_indices=None):
    """Exchange the indices at a unique vertex of degree four.

    The lines in in-form ``[w - zk]^-ck`` must carry ``(a, 1 - a', b,
    1 - b')`` with ``a + b = a' + b'`` exactly. They become ``(a', 1 - a, b',
    1 - b)``, the prefactor gains ``a(a) a(bbar) / (a(a') a(bbar'))`` and the
    lines ``[z1 - z2]^(a'-a)`` and ``[z3 - z4]^(b'-b)`` appear between the
    external nodes (omitted when their index vanishes).

    Keyword Args:
        new_indices (tuple): ``(a', b')``; read off the lines when omitted
            and checked against them otherwise.

    Raises:
        PatternError: On the wrong degree or mismatched ``new_indices``.
        ConstraintError: If the balance does not hold.
    """
    keys = _pattern(d, vertex, 4, 'rewrite_cross')
    forms = [_in_form(d.edges[k], vertex) for k in keys]
    (z1, alpha, _), (z2, c2, _), (z3, beta, _), (z4, c4, _) = forms
    alpha_p, beta_p = 1 - c2, 1 - c4
    if new_indices is not None:
        wanted = tuple(as_expr(x) for x in new_indices)
        if (not (wanted[0] - alpha_p).is_zero() or
                not (wanted[1] - beta_p).is_zero()):
            raise PatternError('rewrite_cross: lines at `{}` carry a\' = {}, '
                               'b\' = {}, not {}'.format(
                                   vertex, alpha_p, beta_p,
                                   ', '.join(map(str, wanted))))
    imbalance = alpha + beta - alpha_p - beta_p
    if not imbalance.is_zero():
        raise ConstraintError('rewrite_cross: balance a + b = a\' + b\' '
                              'fails at `{}` by {}'.format(vertex, imbalance))
    factor = AFactorProduct(
        numerator=[alpha, beta.flip()],
        denominator=[alpha_p, beta_p.flip()],
        sign_power=_signs(*(s for _, _, s in forms)))
    added = [Edge(z1, vertex, alpha_p), Edge(z2, vertex, 1 - alpha),
             Edge(z3, vertex, beta_p), Edge(z4, vertex, 1 - beta),
             Edge(z2, z1, alpha - alpha_p), Edge(z4, z3, beta - beta_p)]
    edges = [e for k, e in enumerate(d.edges) if k not in keys]
    edges += [e for e in added if not e.index.is_zero() or
              vertex in (e.tail, e.head)]
    return Diagram(d.points, d.vertices, edges, d.prefactor * factor)


# Relation diagrams
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def chain_diagram(alpha, beta, z1=POINTS['z1'], z2=POINTS['z2']):
    """``int d^2w [z1 - w]^-alpha [w - z2]^-beta``."""
    return Diagram({'z1': z1, 'z2': z2}, ['w'],
                   [('w', 'z1', alpha), ('z2', 'w', beta)])


def star_diagram(alpha, beta, gamma, z1=POINTS['z1'], z2=POINTS['z2'],
                 z3=POINTS['z3']):
    """``int d^2w [z1 - w]^-alpha [z2 - w]^-beta [z3 - w]^-gamma``."""
    return Diagram({'z1': z1, 'z2': z2, 'z3': z3}, ['w'],
                   [('w', 'z1', alpha), ('w', 'z2', beta),
                    ('w', 'z3', gamma)])


def cross_diagram(alpha, beta, alpha_p, beta_p, z1=POINTS['z1'],
                  z2=POINTS['z2'], z3=POINTS['z3'], z4=POINTS['z4']):
    """``int d^2w [w-z1]^-a [w-z2]^(a'-1) [w-z3]^-b [w-z4]^(b'-1)``."""
    alpha, beta = as_expr(alpha), as_expr(beta)
    alpha_p, beta_p = as_expr(alpha_p), as_expr(beta_p)
    return Diagram({'z1': z1, 'z2': z2, 'z3': z3, 'z4': z4}, ['w'],
                   [('z1', 'w', alpha), ('z2', 'w', 1 - alpha_p),
                    ('z3', 'w', beta), ('z4', 'w', 1 - beta_p)])


# Fourier transform
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def fourier_closed_form(alpha, p):
    """``pi i^[alpha] a(alpha) [p]^(alpha - 1)``."""
    alpha = _bi_index(alpha)
    return (math.pi * i_power(alpha.n) * a_product([alpha]) *
            power_bi(complex(p), alpha - 1))


def fourier_transform(alpha, p, target_rel_error=1e-9,
                      budget=DEFAULT_BUDGET):
    """``int d^2z exp(i(p z + conj(p z))) [z]^-alpha`` by Bessel reduction.

    With ``z = r e^{i theta}`` the angular integral leaves
    ``2 pi i^m e^{-i m arg p} int r^(1 - alpha - alpha_bar) J_m(2|p|r) dr``
    with ``m = -[alpha]``.

    Raises:
        PlanError: Outside ``1/2 < Re(alpha + alpha_bar) < 2`` or at
            ``p = 0``.
    """
    alpha = _bi_index(alpha)
    p = complex(p)
    if p == 0:
        raise PlanError('fourier_transform: momentum must be nonzero')
    plan = QuadPlan([(0, alpha)], decay_at_infinity=alpha, oscillation=p,
                    target_rel_error=target_rel_error,
                    max_evaluations=budget)
    order = -alpha.n
    radial = integrate_radial_oscillatory(
        lambda r: np.asarray(r, dtype=float) ** -alpha.total, order, abs(p),
        plan)
    factor = (2 * math.pi * i_power(order) *
              np.exp(-1j * order * np.angle(p)))
    return radial.scaled(complex(factor))


def _bi_index(value):
    if isinstance(value, BiIndex):
        return value
    return as_expr(value).evaluate({})


# Verification drivers
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def _pole_distance(indices):
    """Distance of the Gamma arguments of ``a(idx)`` to the nearest pole."""
    worst = math.inf
    for idx in indices:
        for z in (idx.alpha, 1 - idx.alpha_bar):
            if z.real <= 0.5:
                nearest = min(0, round(z.real))
                worst = min(worst, abs(z - nearest))
    return worst


def _draw(rng, low, high, gaps=(-1, 0, 1), nu=0.2):
    """A bi-index ``(c + n/2 + i v, c - n/2 + i v)``."""
    c = rng.uniform(low, high)
    n = int(rng.choice(gaps))
    v = rng.uniform(-nu, nu)
    return BiIndex(complex(c + n / 2, v), complex(c - n / 2, v), n=n)


def sample_parameters(which, seed=0):
    """Draw a parameter point inside the convergence window of a relation.

    Every Gamma argument of the closed form stays at least 0.1 away from a
    pole.

    >>> sorted(sample_parameters('chain', seed=1))
    ['alpha', 'beta']
    """
    if which not in RELATIONS:
        raise ValueError('unknown relation `{}`'.format(which))
    rng = np.random.default_rng(seed)
    while True:
        if which == 'chain':
            params = {'alpha': _draw(rng, 0.55, 0.85),
                      'beta': _draw(rng, 0.55, 0.85)}
            indices = list(params.values())
            indices.append(2 - sum(indices, BiIndex(0)))
        elif which == 'star':
            params = {'alpha': _draw(rng, 0.55, 0.8),
                      'beta': _draw(rng, 0.55, 0.8)}
            indices = list(params.values())
            indices.append(2 - sum(indices, BiIndex(0)))
        elif which == 'cross':
            params = {'alpha': _draw(rng, 0.3, 0.7),
                      'beta': _draw(rng, 0.3, 0.7),
                      'alpha_p': _draw(rng, 0.3, 0.7)}
            beta_p = params['alpha'] + params['beta'] - params['alpha_p']
            if not 0.5 < beta_p.total.real < 1.5:
                continue
            # beta_p follows from the balance.
            indices = list(params.values()) + [beta_p]
            indices += [idx.flip() for idx in indices]
        else:
            params = {'alpha': _draw(rng, 0.35, 0.9, gaps=range(-2, 3)),
                      'p': complex(*rng.uniform(-1.5, 1.5, size=2))}
            if abs(params['p']) < 0.5:
                continue
            indices = [params['alpha']]
        if _pole_distance(indices) >= 0.1:
            return params


def _relation_sides(which, params, target_rel_error, budget):
    """Numeric left side, closed-form right side and the details of one
    relation check."""
    points = {name: _point(params[name]) for name in _POINT_NAMES[which]
              if name in params}
    if which == 'fourier':
        alpha = _bi_index(params['alpha'])
        p = _point(params.get('p', 1))
        lhs = fourier_transform(alpha, p, target_rel_error, budget)
        return lhs, IntegralEstimate(fourier_closed_form(alpha, p), 0.0, 0,
                                     True), {}
    alpha, beta = as_expr(params['alpha']), as_expr(params['beta'])
    if which == 'chain':
        before = chain_diagram(alpha, beta, **points)
        after = rewrite_chain(before, 'w')
    elif which == 'star':
        gamma = (as_expr(params['gamma']) if 'gamma' in params
                 else 2 - alpha - beta)
        before = star_diagram(alpha, beta, gamma, **points)
        after = rewrite_star_triangle(before, 'w')
    else:
        alpha_p = as_expr(params['alpha_p'])
        beta_p = (as_expr(params['beta_p']) if 'beta_p' in params
                  else alpha + beta - alpha_p)
        before = cross_diagram(alpha, beta, alpha_p, beta_p, **points)
        after = rewrite_cross(before, 'w')
    lhs = eval_diagram(before, target_rel_error, budget=budget)
    rhs = eval_diagram(after, target_rel_error, budget=budget)
    return lhs, rhs, {'rewritten': serializable(after)}


def verify_relation(which, params=None, target=1e-6, case_id=None, seed=0,
                    budget=DEFAULT_BUDGET):
    """Check one relation numerically.

    Args:
        which (str): One of ``chain``, ``star``, ``cross``, ``fourier``.

    Keyword Args:
        params (dict): Indices (``alpha``, ``beta``, ``gamma``, ``alpha_p``,
            ``beta_p``), points (``z1`` .. ``z4``) and the momentum ``p``.
            Drawn with :func:`sample_parameters` when omitted.
        target (float): Relative deviation that passes.
        case_id (str): Identifier echoed in the report.
        seed (int): Seed for drawn parameters.
        budget (int): Evaluation budget of each quadrature.

    Returns:
        Report: Left side by quadrature, right side by closed form.
    """
    if which not in RELATIONS:
        raise ValueError('unknown relation `{}`'.format(which))
    if params is None:
        params = sample_parameters(which, seed)
    start = time.perf_counter()
    lhs, rhs, details = _relation_sides(which, params, target / 20, budget)
    wall_ms = int(1000 * (time.perf_counter() - start))
    scale = max(abs(rhs.value), 1e-300)
    error = (lhs.abs_error_estimate + rhs.abs_error_estimate) / scale
    details['params'] = serializable(params)
    report = Report.compare(
        case_id or '{}-{}'.format(which, seed), which, ANCHORS[which],
        lhs.value, rhs.value, target, error_estimate=error,
        converged=lhs.converged and rhs.converged,
        evaluations=lhs.evaluations + rhs.evaluations, wall_ms=wall_ms,
        details=details)
    log.info('%s: %s (rel_dev %.2e)', report.case_id,
             'pass' if report.passed else 'FAIL', report.rel_dev)
    return report
