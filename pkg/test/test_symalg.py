#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# test_symalg.py

import json
import math
import random

import mpmath
import pytest

from conftest import p
from pysl2c.exceptions import PoleError
from pysl2c.serialize import serializable
from pysl2c.specfun import (BiIndex, SeparatedPoint, Spin, a_factor,
                            power_bi)
from pysl2c.symalg import (I, AffineExpr, AFactorProduct, QComplex,
                           ba_closed_form, bind, canonicalize,
                           gustafson_integrand, gustafson_rhs,
                           layer_normalization, measure_a_product,
                           measure_b_product, mellin_index, q_factor,
                           txx_closed_form)
from pysl2c.utils import i_power, rel_dev

BASES = {'z0': 0.6 - 0.3j, 'p': 1.3 + 0.4j}


def random_values(names, seed, offset=0.05):
    """Ket-side names get +offset, names starting with `xp` or `u` -offset."""
    rng = random.Random(seed)
    values = {'s': Spin(rng.choice([0, 1, -1]), rng.uniform(-0.5, 0.5))}
    for name in names:
        sign = -1 if name.startswith(('xp', 'u')) else 1
        values[name] = SeparatedPoint(
            rng.randint(-2, 2), complex(rng.uniform(-1, 1), sign * offset))
    return values


def test_qcomplex_arithmetic():
    z = QComplex(1, 2)
    assert z * I == QComplex(-2, 1)
    assert z - z == QComplex(0)
    assert z / QComplex(0, 1) == QComplex(2, -1)
    assert complex(z + 0.5) == 1.5 + 2j
    with pytest.raises(ZeroDivisionError):
        z / 0


def test_affine_expr_arithmetic():
    x = AffineExpr.param('x')
    e = 1 + I * x
    assert e.flip().flip() == e
    assert (e - e).is_zero()
    assert e.params() == {'x'}
    assert str(2 * x - 1) == '(-1 + 2*x | -1 + 2*bar(x))'


def test_gap_is_exact_integer():
    x, xp, s = (AffineExpr.param(n) for n in ('x', 'xp', 's'))
    values = bind({'x': SeparatedPoint(2, 0.3 + 0.05j),
                   'xp': SeparatedPoint(-1, 0.1 - 0.05j),
                   's': Spin(1, 0.2)})
    gap = (1 + I * (x - xp)).gap(values)
    assert gap == 3
    assert isinstance(gap, int)
    assert (s - I * x).gap(values) == 1 - 2
    assert (s - I * x).evaluate(values).n == -1


def test_gap_of_random_arguments_matches_values():
    names = ['x1', 'x2', 'xp1', 'xp2']
    product = txx_closed_form(['x1', 'x2'], ['xp1', 'xp2'])
    for seed in range(10):
        values = bind(random_values(names, seed))
        for expr in product.numerator + product.denominator:
            holo, anti = expr.values(values)
            gap = expr.gap(values)
            assert isinstance(gap, int)
            assert abs(holo - anti - gap) < 1e-12


def test_non_integer_gap_rejected():
    half = AffineExpr.constant(QComplex(1, 0), 0.5)
    with pytest.raises(ValueError):
        half.gap({})


def test_mellin_index():
    point = SeparatedPoint(3, 0.25)
    idx = mellin_index(point)
    assert idx.n == -3
    assert abs(idx.alpha - (0.25j - 1.5)) < 1e-15
    symbolic = mellin_index('x').evaluate(bind({'x': point}))
    assert symbolic.n == idx.n
    assert abs(symbolic.alpha - idx.alpha) < 1e-15


def test_q_factor_matches_direct_evaluation():
    x = SeparatedPoint(0, 0.3 + 0.05j)
    xp = SeparatedPoint(0, 0.3 - 0.05j)
    spin = Spin(0, 0.1)
    result = q_factor().evaluate({'x': x, 'xp': xp, 's': spin})
    first = BiIndex(1 + 1j * (x.x - xp.x), 1 + 1j * (x.x_bar - xp.x_bar))
    s_x = BiIndex(spin.s - 1j * x.x, spin.s_bar - 1j * x.x_bar)
    s_xp = BiIndex(spin.s - 1j * xp.x, spin.s_bar - 1j * xp.x_bar)
    answer = (math.pi * a_factor(first) * a_factor(s_x.flip()) /
              a_factor(s_xp))
    p(result, answer)
    assert rel_dev(result, answer) < 1e-13


def test_q_factor_singular_at_coincident_points():
    x = SeparatedPoint(1, 0.3)
    with pytest.raises(PoleError):
        q_factor().evaluate({'x': x, 'xp': x, 's': Spin(0, 0.1)})


@pytest.mark.parametrize('d', [1, 2, -3])
def test_q_argument_against_gamma_recurrence(d):
    nu, nu_p = 0.37 + 0.05j, -0.21 - 0.05j
    x = SeparatedPoint(d, nu)
    xp = SeparatedPoint(0, nu_p)
    expr = 1 + I * (AffineExpr.param('x') - AffineExpr.param('xp'))
    result = a_factor(expr.evaluate(bind({'x': x, 'xp': xp})))
    mu = mpmath.mpc(nu_p.real, nu_p.imag) - mpmath.mpc(nu.real, nu.imag)
    answer = complex((-1) ** d * mpmath.gamma(1j * mu - d / 2) /
                     mpmath.gamma(1 - 1j * mu - d / 2))
    p(result, answer)
    assert rel_dev(result, answer) < 1e-12


def test_txx_n1_structure():
    product = txx_closed_form(['x'], ['xp'])
    s, x = AffineExpr.param('s'), AffineExpr.param('x')
    assert product.sign_power == s - I * x
    assert [tag for tag, _ in product.extra_powers] == ['z0']
    values = random_values(['x', 'xp'], seed=1)
    expected = (q_factor().evaluate(values) *
                (-1) ** (values['s'].n_s - values['x'].n) *
                power_bi(BASES['z0'], BiIndex(
                    1j * (values['x'].x - values['xp'].x),
                    1j * (values['x'].x_bar - values['xp'].x_bar))))
    assert rel_dev(product.evaluate(values, BASES), expected) < 1e-12


def test_txx_requires_matching_lists():
    with pytest.raises(ValueError):
        txx_closed_form(['x1', 'x2'], ['xp1'])
    with pytest.raises(ValueError):
        txx_closed_form([], [])


def test_ba_n1_matches_explicit_form():
    values = random_values(['x'], seed=4)
    spin, x = values['s'], values['x']
    result = ba_closed_form([], ['x']).evaluate(values, BASES)
    a_x = BiIndex(spin.s - 1j * x.x, spin.s_bar - 1j * x.x_bar)
    answer = (i_power(a_x.n) * math.pi * abs(BASES['p']) ** -2 *
              power_bi(BASES['p'], a_x) * a_factor(a_x.flip()))
    p(result, answer)
    assert rel_dev(result, answer) < 1e-12


def test_ba_n1_matches_fourier_transform_at_minus_p():
    # <e^{ipz + c.c.}|[z]^{ix - s}> is the propagator's Fourier transform at
    # -p with alpha = s - ix.
    values = random_values(['x'], seed=5)
    spin, x = values['s'], values['x']
    alpha = BiIndex(spin.s - 1j * x.x, spin.s_bar - 1j * x.x_bar)
    fourier = (math.pi * i_power(alpha.n) * a_factor(alpha) *
               power_bi(-BASES['p'], alpha - 1))
    result = ba_closed_form([], ['x']).evaluate(values, BASES)
    assert rel_dev(result, fourier) < 1e-12


def test_ba_length_check():
    with pytest.raises(ValueError):
        ba_closed_form(['u1', 'u2'], ['x1', 'x2'])


def test_reflection_pair_cancels():
    alpha = AffineExpr.param('al')
    base = q_factor()
    padded = base * AFactorProduct(numerator=[alpha, 1 - alpha.flip()])
    assert canonicalize(padded) == canonicalize(base)


def test_complement_pair_collapses_to_sign():
    alpha = AffineExpr.param('al')
    product = AFactorProduct(numerator=[alpha, 1 - alpha])
    canonical = canonicalize(product)
    assert canonical.numerator == ()
    assert canonical.pairs == ()
    for n in range(-3, 4):
        value = canonical.evaluate({'al': BiIndex(0.3 + 0.1j + n, 0.3 + 0.1j)})
        assert abs(value - (-1) ** n) < 1e-14


def test_shift_rule_normal_form():
    alpha = AffineExpr.param('al')
    shifted = AFactorProduct.a(1 + alpha)
    rule = AFactorProduct(numerator=[alpha], pairs=[(alpha, -1)],
                          sign_power=AffineExpr.integer(1))
    assert canonicalize(shifted) == canonicalize(rule)
    rng = random.Random(11)
    for _ in range(50):
        n = rng.randint(-3, 3)
        a = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        values = {'al': BiIndex(a, a - n)}
        direct = shifted.evaluate(values)
        assert rel_dev(canonicalize(shifted).evaluate(values), direct) < 1e-11


def test_conjugate_flip_normal_form():
    alpha = AffineExpr.param('al')
    assert (canonicalize(AFactorProduct.a(alpha)) ==
            canonicalize(AFactorProduct(numerator=[alpha.flip()],
                                        sign_power=alpha)))


def test_gustafson_rhs_n1_is_one():
    canonical = canonicalize(gustafson_rhs(['x1'], ['xp1']))
    assert canonical == AFactorProduct()
    values = random_values(['x1', 'xp1'], seed=2)
    assert abs(gustafson_rhs(['x1'], ['xp1']).evaluate(values) - 1) < 1e-14


def builders():
    return [
        (txx_closed_form(['x1', 'x2'], ['xp1', 'xp2']),
         ['x1', 'x2', 'xp1', 'xp2']),
        (ba_closed_form(['u1'], ['x1', 'x2']), ['u1', 'x1', 'x2']),
        (gustafson_rhs(['x1', 'x2'], ['xp1', 'xp2']),
         ['x1', 'x2', 'xp1', 'xp2']),
        (gustafson_integrand(['x1', 'x2', 'x3'], ['xp1', 'xp2', 'xp3'],
                             ['u1', 'u2']),
         ['x1', 'x2', 'x3', 'xp1', 'xp2', 'xp3', 'u1', 'u2']),
        (layer_normalization(3, 'x1'), ['x1']),
        (measure_a_product(['x1', 'x2', 'x3']), ['x1', 'x2', 'x3']),
    ]


def test_canonicalize_is_idempotent():
    for product, _ in builders():
        once = canonicalize(product)
        assert canonicalize(once) == once


def test_canonicalize_preserves_value():
    worst = 0.0
    for product, names in builders():
        canonical = canonicalize(product)
        for seed in range(20):
            values = random_values(names, seed)
            direct = product.evaluate(values, BASES)
            worst = max(worst, rel_dev(canonical.evaluate(values, BASES),
                                       direct))
    p(worst, 1e-10)
    assert worst < 1e-10


def test_closed_forms_are_permutation_invariant():
    assert (canonicalize(txx_closed_form(['x1', 'x2'], ['xp1', 'xp2'])) ==
            canonicalize(txx_closed_form(['x2', 'x1'], ['xp1', 'xp2'])))
    assert (canonicalize(txx_closed_form(['x1', 'x2'], ['xp1', 'xp2'])) ==
            canonicalize(txx_closed_form(['x1', 'x2'], ['xp2', 'xp1'])))
    assert (canonicalize(ba_closed_form(['u1'], ['x1', 'x2'])) ==
            canonicalize(ba_closed_form(['u1'], ['x2', 'x1'])))
    assert (canonicalize(measure_a_product(['x1', 'x2'])) ==
            canonicalize(measure_a_product(['x2', 'x1'])))


def test_canonical_json_is_deterministic():
    first = canonicalize(txx_closed_form(['x1', 'x2'], ['xp1', 'xp2']))
    second = canonicalize(txx_closed_form(['x2', 'x1'], ['xp2', 'xp1']))
    text = json.dumps(serializable(first), sort_keys=True)
    assert text == json.dumps(serializable(second), sort_keys=True)
    assert '"pi_power": 4' in text


def test_canonical_gustafson_integrand_regular_on_diagonal():
    names = ['x1', 'x2', 'x3', 'xp1', 'xp2', 'xp3']
    values = random_values(names, seed=8)
    values['u1'] = values['u2'] = SeparatedPoint(1, 0.2)
    product = gustafson_integrand(['x1', 'x2', 'x3'], ['xp1', 'xp2', 'xp3'],
                                  ['u1', 'u2'])
    assert canonicalize(product).denominator == ()
    assert canonicalize(product).evaluate(values) == 0


def test_measures():
    x = SeparatedPoint(1, 0.4)
    assert abs(measure_a_product(['x1']).evaluate({'x1': x}) -
               1 / (2 * math.pi ** 2)) < 1e-16
    assert abs(measure_b_product([]).evaluate({}) - 1 / math.pi ** 2) < 1e-16
    values = {'x1': x, 'x2': x}
    assert measure_a_product(['x1', 'x2']).evaluate(values) == 0
    with pytest.raises(ValueError):
        measure_b_product(['x1'], N=3)


def test_layer_normalization():
    values = random_values(['x'], seed=9)
    spin, x = values['s'], values['x']
    plus = BiIndex(spin.s + 1j * x.x, spin.s_bar + 1j * x.x_bar)
    minus = BiIndex(spin.s - 1j * x.x, spin.s_bar - 1j * x.x_bar).flip()
    answer = (a_factor(plus) * a_factor(minus)) ** 2
    result = layer_normalization(3).evaluate(values)
    assert rel_dev(result, answer) < 1e-12
    assert layer_normalization(1) == AFactorProduct()


def test_array_evaluation_matches_scalar():
    from pysl2c.symalg import grid_binding
    product = canonicalize(gustafson_integrand(['x1', 'x2'], ['xp1', 'xp2'],
                                               ['u1']))
    values = random_values(['x1', 'x2', 'xp1', 'xp2'], seed=12)
    ns, nus = [-1, 0, 2], [-0.7, 0.1, 1.9]
    array_values = dict(values, u1=grid_binding(ns, nus))
    array_result = product.evaluate(array_values)
    for n, nu, value in zip(ns, nus, array_result):
        scalar = product.evaluate(dict(values, u1=SeparatedPoint(n, nu)))
        assert rel_dev(value, scalar) < 1e-12
