#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# test_diagrams.py

import json
import math
from fractions import Fraction

import pytest

from conftest import p
from pysl2c.diagrams import (POINTS, RELATIONS, Diagram, chain_diagram,
                             check_window, cross_diagram, eval_diagram,
                             fourier_closed_form, fourier_transform,
                             rewrite_chain, rewrite_cross,
                             rewrite_star_triangle, sample_parameters,
                             star_diagram, verify_relation)
from pysl2c.exceptions import (ConstraintError, PatternError, PlanError,
                               PoleError)
from pysl2c.serialize import serializable
from pysl2c.specfun import BiIndex, power_bi
from pysl2c.symalg import AffineExpr, as_expr
from pysl2c.utils import minus_one_power, rel_dev


def compare(before, after, target=1e-8, values=None):
    lhs = eval_diagram(before, target, values=values)
    rhs = eval_diagram(after, target, values=values)
    p(lhs.value, rhs.value)
    return rel_dev(lhs.value, rhs.value)


def test_zero_vertex_diagram_is_a_product_of_propagators():
    idx = BiIndex(0.3 + 0.1j, -0.7 + 0.1j)
    d = Diagram(POINTS, [], [('z1', 'z2', idx), ('z3', 'z4', 0.5)])
    answer = (power_bi(POINTS['z2'] - POINTS['z1'], -idx) *
              power_bi(POINTS['z4'] - POINTS['z3'], -BiIndex(0.5)))
    result = eval_diagram(d)
    assert abs(result.value - answer) <= 1e-15 * abs(answer)
    assert result.evaluations == 0


def test_edge_flip_is_exact():
    d = Diagram(POINTS, [], [('z2', 'z1', BiIndex(0.8, -0.2))])
    value = eval_diagram(d).value
    assert eval_diagram(d.flip_edge(0)).value == value
    normal = d.normalized()
    assert abs(eval_diagram(normal).value - value) <= 1e-15 * abs(value)


def test_normalized_orients_edges_by_rank():
    d = Diagram(POINTS, ['w'], [('w', 'z1', 0.6), ('z2', 'w', 0.7),
                                ('z4', 'z3', 0.2)])
    normal = d.normalized()
    for e in normal.edges:
        assert normal.rank(e.tail) < normal.rank(e.head)
    assert normal.normalized() == normal


def test_merged_joins_parallel_lines():
    a, b = BiIndex(0.3 + 0.1j, -0.7 + 0.1j), BiIndex(0.45)
    d = Diagram(POINTS, [], [('z1', 'z2', a), ('z3', 'z1', 0.2),
                             ('z2', 'z1', b)])
    merged = d.merged()
    assert [(e.tail, e.head) for e in merged.edges] == [('z1', 'z2'),
                                                        ('z3', 'z1')]
    value = eval_diagram(d).value
    assert abs(eval_diagram(merged).value - value) <= 1e-14 * abs(value)
    cancelled = Diagram(POINTS, [], [('z1', 'z2', a), ('z1', 'z2', -a)])
    assert cancelled.merged().edges == ()


def test_diagram_rejects_bad_edges():
    with pytest.raises(ValueError):
        Diagram(POINTS, ['w'], [('w', 'z9', 0.5)])
    with pytest.raises(ValueError):
        Diagram(POINTS, ['w'], [('w', 'w', 0.5)])
    with pytest.raises(ValueError):
        Diagram(POINTS, ['z1'], [])


def test_chain_rewrite_soundness():
    before = chain_diagram(BiIndex(0.6), BiIndex(0.7))
    after = rewrite_chain(before, 'w')
    assert after.vertices == ()
    assert compare(before, after) < 1e-6


def test_chain_rewrite_with_symbolic_indices():
    a, b = AffineExpr.param('a'), AffineExpr.param('b')
    before = chain_diagram(a, b)
    after = rewrite_chain(before, 'w')
    values = {'a': BiIndex(0.8 + 0.1j, -0.2 + 0.1j), 'b': BiIndex(0.85)}
    assert compare(before, after, values=values) < 1e-6


@pytest.mark.parametrize('seed', range(3))
def test_chain_random_draws(seed):
    report = verify_relation('chain', seed=seed, target=1e-6)
    p(report.lhs, report.rhs)
    assert report.passed


def test_chain_with_vanishing_new_index_is_degenerate():
    before = chain_diagram(BiIndex(0.4), BiIndex(0.6))
    after = rewrite_chain(before, 'w')
    # The new line has index 0 and is dropped.
    assert after.edges == ()
    with pytest.raises(PlanError):
        eval_diagram(before)
    # gamma = 1 puts a pole of Gamma in the prefactor.
    with pytest.raises(PoleError):
        eval_diagram(after)


def test_chain_pattern_errors():
    star = star_diagram(0.6, 0.6, 0.8)
    with pytest.raises(PatternError):
        rewrite_chain(star, 'w')
    with pytest.raises(PatternError):
        rewrite_chain(star, 'z1')
    parallel = Diagram(POINTS, ['w'], [('w', 'z1', 0.6), ('z1', 'w', 0.7)])
    with pytest.raises(PatternError):
        rewrite_chain(parallel, 'w')


def test_star_triangle_symmetric_point():
    third = as_expr(Fraction(2, 3))
    before = star_diagram(third, third, third)
    after = rewrite_star_triangle(before, 'w')
    assert len(after.edges) == 3
    assert compare(before, after) < 1e-6


def test_star_triangle_report():
    third = Fraction(2, 3)
    report = verify_relation('star', params={'alpha': third, 'beta': third},
                             target=1e-6)
    assert report.passed


def test_star_triangle_constraint_error():
    with pytest.raises(ConstraintError):
        rewrite_star_triangle(star_diagram(0.6, 0.6, 0.6), 'w')
    with pytest.raises(PatternError):
        rewrite_star_triangle(chain_diagram(0.6, 0.7), 'w')


def test_star_reduces_to_chain_far_away():
    alpha = as_expr(BiIndex(0.6))
    beta = as_expr(BiIndex(0.8, -0.2))
    gamma = 2 - alpha - beta
    chain = eval_diagram(rewrite_chain(chain_diagram(alpha, beta), 'w'))
    limit = minus_one_power(beta.gap({})) * chain.value
    deviations = []
    for far in (1e3, 1e4):
        star = rewrite_star_triangle(star_diagram(alpha, beta, gamma,
                                                  z3=far), 'w')
        value = eval_diagram(star).value * power_bi(far, gamma.evaluate({}))
        deviations.append(rel_dev(value, limit))
    p(deviations, limit)
    assert deviations[0] < 5e-3
    assert deviations[1] < deviations[0] / 5


def test_cross_identity_move_leaves_diagram_unchanged():
    d = cross_diagram(0.4, 0.5, 0.4, 0.5)
    moved = rewrite_cross(d, 'w')
    assert moved.normalized() == d.normalized()


def test_cross_constraint_and_pattern_errors():
    with pytest.raises(ConstraintError):
        rewrite_cross(cross_diagram(0.4, 0.5, 0.6, 1.3), 'w')
    d = cross_diagram(0.4, 0.5, 0.6, 0.3)
    with pytest.raises(PatternError):
        rewrite_cross(d, 'w', new_indices=(0.5, 0.4))
    rewritten = rewrite_cross(d, 'w', new_indices=(0.6, 0.3))
    # Four lines at the vertex plus two external lines.
    assert len(rewritten.edges) == 6


def test_cross_relation_numeric():
    params = {'alpha': 0.4, 'beta': 0.5, 'alpha_p': 0.6, 'beta_p': 0.3}
    report = verify_relation('cross', params=params, target=1e-5)
    p(report.lhs, report.rhs)
    assert report.passed


def test_cross_relation_at_an_odd_gap():
    # a - a' has gap 1, so the orientation of the external lines matters.
    alpha = BiIndex(1.1 + 0.2j, 0.1 + 0.2j)
    params = {'alpha': alpha, 'beta': BiIndex(0.5),
              'alpha_p': BiIndex(0.5)}
    report = verify_relation('cross', params=params, target=1e-5)
    p(report.lhs, report.rhs)
    assert report.passed


@pytest.mark.slow
@pytest.mark.parametrize('seed', range(5))
def test_rewrite_soundness_random_draws(seed):
    for which in ('chain', 'star', 'cross'):
        target = 1e-5 if which == 'cross' else 1e-6
        report = verify_relation(which, seed=seed, target=target)
        assert report.passed, report


def test_confluence_of_chain_rewrites():
    alpha, beta, gamma = (AffineExpr.param(name)
                          for name in ('alpha', 'beta', 'gamma'))
    d = Diagram({'z1': POINTS['z1'], 'z2': POINTS['z2']}, ['u', 'v'],
                [('u', 'z1', alpha), ('v', 'u', beta), ('z2', 'v', gamma)])
    first = rewrite_chain(rewrite_chain(d, 'u'), 'v').normalized()
    second = rewrite_chain(rewrite_chain(d, 'v'), 'u').normalized()
    assert first.edges == second.edges
    assert first.prefactor == second.prefactor
    assert first.prefactor.pi_power == 2


@pytest.mark.slow
def test_rewrite_commutes_with_nested_quadrature():
    idx = BiIndex(0.7)
    d = Diagram({'z1': POINTS['z1'], 'z2': POINTS['z2']}, ['u', 'v'],
                [('u', 'z1', idx), ('v', 'u', idx), ('z2', 'v', idx)])
    nested = eval_diagram(d, 1e-5)
    once = eval_diagram(rewrite_chain(d, 'u'), 1e-7)
    closed = eval_diagram(rewrite_chain(rewrite_chain(d, 'u'), 'v'))
    p(nested.value, closed.value)
    assert rel_dev(once.value, closed.value) < 1e-6
    assert rel_dev(nested.value, closed.value) < 1e-4
    swapped = eval_diagram(d._replace(vertices=('v', 'u')), 1e-5)
    assert rel_dev(swapped.value, closed.value) < 1e-4


def test_window_names_the_vertex():
    with pytest.raises(PlanError) as excinfo:
        eval_diagram(chain_diagram(0.5, 0.5))
    assert '`w`' in str(excinfo.value)
    with pytest.raises(PlanError):
        check_window(star_diagram(1.0, 0.5, 0.5))


def test_too_many_vertices():
    d = Diagram(POINTS, ['u', 'v', 'w'],
                [('u', 'z1', 0.6), ('v', 'u', 0.6), ('w', 'v', 0.6),
                 ('z2', 'w', 0.6)])
    with pytest.raises(PlanError):
        eval_diagram(d)


def test_json_round_trip():
    a, b = AffineExpr.param('a'), AffineExpr.param('b')
    d = rewrite_chain(chain_diagram(a, b + Fraction(1, 3)), 'w')
    text = json.dumps(serializable(d))
    assert Diagram.from_dict(json.loads(text)) == d


def test_fourier_half_propagator():
    result = fourier_transform(BiIndex(0.5), 1, target_rel_error=1e-10)
    p(result.value, math.pi)
    assert abs(result.value - math.pi) < 1e-8
    assert abs(fourier_closed_form(BiIndex(0.5), 1) - math.pi) < 1e-14


@pytest.mark.parametrize('seed', range(5))
def test_fourier_random_draws(seed):
    report = verify_relation('fourier', seed=seed, target=1e-7)
    p(report.lhs, report.rhs)
    assert report.passed


def test_fourier_gaps_cover_range():
    gaps = {sample_parameters('fourier', seed)['alpha'].n
            for seed in range(100)}
    assert gaps == {-2, -1, 0, 1, 2}


@pytest.mark.parametrize('which', RELATIONS)
def test_sample_parameters_is_deterministic(which):
    assert sample_parameters(which, 3) == sample_parameters(which, 3)
