#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# test_suites.py

from fractions import Fraction

import pytest

from conftest import p
from pysl2c import data, suites
from pysl2c.config import load_config
from pysl2c.exceptions import ConfigError
from pysl2c.sov import ChainConfig, shift_element_closed
from pysl2c.specfun import BiIndex, SeparatedPoint, Spin


@pytest.fixture(scope='module')
def config():
    return load_config(overrides={'workers': 2})


@pytest.fixture(scope='module')
def shipped():
    return data.load_suite('all')


def case(identity, params, **kwargs):
    return dict({'id': identity + '-test', 'identity': identity,
                 'params': params}, **kwargs)


def test_every_suite_has_identities():
    for suite in suites.SUITES:
        assert suites.identities(suite)
    assert set(suites.identities('all')) == set(suites.metadata)
    with pytest.raises(ConfigError):
        suites.identities('everything')


def test_every_identity_is_documented_and_anchored():
    for name, meta in suites.metadata.items():
        assert meta['doc'].strip()
        assert suites.ANCHORS[name]
        assert meta['tolerance'] in load_config().tolerances


def test_shipped_cases_cover_every_identity(shipped):
    ids = [c['id'] for c in shipped]
    assert len(ids) == len(set(ids))
    assert {c['identity'] for c in shipped} == set(suites.metadata)


def test_load_suite_reads_only_its_files():
    gustafson = data.load_suite('gustafson')
    assert {c['identity'] for c in gustafson} == {'gustafson'}
    sov = data.load_suite('sov')
    # Two-site cases live in their own file.
    assert any(suites.chain_length(c) == 2 for c in sov)


def test_parameter_parsing():
    assert suites._complex('0.3 - 0.1j') == 0.3 - 0.1j
    assert suites._complex([1, 2]) == 1 + 2j
    assert suites._complex(2) == 2
    assert suites._bi_index('1/3') == BiIndex(Fraction(1, 3))
    assert suites._bi_index([0.75, -0.25]).n == 1
    assert suites._separated([1, '0.2+0.05j']) == SeparatedPoint(1,
                                                                 0.2 + 0.05j)
    assert suites._separated({'n': -1, 'nu': [0.3, 0]}) == SeparatedPoint(
        -1, 0.3)
    assert suites._spin({'n_s': 1, 'nu_s': 0.2}) == Spin(1, 0.2)


def test_chain_defaults_to_the_configured_offset(config):
    cfg = suites._chain({}, config)
    assert cfg == ChainConfig(1, regularization=config.regularization)
    cfg = suites._chain({'chain': {'N': 2, 'regularization': 0.1}}, config)
    assert cfg.N == 2
    assert cfg.regularization == 0.1


def test_contour_from_case(config):
    contour = suites._contour({}, 1e-3, config)
    assert contour.names == ['u']
    assert contour.variables[0].n_max == config.mb.n_max
    assert contour.target_rel_error == 1e-3
    contour = suites._contour(
        {'contour': {'variables': [{'name': 'u', 'n_max': 10,
                                    'cutoff': 8.0}]},
         'n_max': 12}, 1e-2, config)
    assert contour.variables[0].n_max == 12
    assert contour.variables[0].cutoff == 8.0
    with pytest.raises(ConfigError):
        suites._contour({'contour': {'variables': [{'name': 'u',
                                                    'n_max': 2}]}},
                        1e-2, config)


def test_default_targets(config):
    assert suites.default_target('chain', config) == 1e-6
    assert suites.default_target('cross', config) == 1e-5
    two_sites = case('txx', {'chain': {'N': 2}})
    assert suites.default_target('txx', config, two_sites) == 1e-3
    assert suites.default_target('txx', config, case('txx', {})) == 1e-5
    # Only the chain suite loosens with N.
    assert suites.default_target('gustafson', config,
                                 case('gustafson', {'N': 2})) == 1e-4


def test_a_function_case(config):
    report = suites.run_case(case('a_function', {'seed': 3, 'points': 200}),
                             config)
    p(report.details['residuals'], 1e-11)
    assert report.passed
    assert report.evaluations == 200
    assert set(report.details['residuals']) == {'reflection', 'shift',
                                                'complement', 'flip'}


def test_target_precedence(config):
    c = case('a_function', {'points': 10}, target=1e-30)
    assert not suites.run_case(c, config).passed
    assert suites.run_case(c, config, target=1e-9).passed


def test_malformed_fields_name_the_field(config):
    with pytest.raises(ConfigError) as excinfo:
        suites.run_case(case('completeness_b', {'z': 'zero', 'w': 0}),
                        config)
    assert '`z`' in str(excinfo.value)
    with pytest.raises(ConfigError) as excinfo:
        suites.run_case(case('mb_propagator', {'beta': 0.5, 'z': 0.6}),
                        config)
    assert 'missing field `w`' in str(excinfo.value)
    with pytest.raises(ConfigError):
        suites.run_case(case('nothing', {}), config)


def test_pinched_contour_fails_the_case(config):
    c = case('gustafson', {
        'x': [[0, '0.2-0.05j'], [0, '-0.4-0.05j']],
        'xp': [[0, '0.1-0.05j'], [0, '0.5-0.05j']]})
    report = suites.run_case(c, config)
    p(report.details, 'PoleOnContour')
    assert not report.passed
    assert report.details['error'].startswith('PoleOnContour')


def test_broken_star_constraint_fails_the_case(config):
    c = case('mb_star', {'betas': [0.4, 0.4, 0.4],
                         'lambdas': [[0, 0.2], [1, -0.3], [-1, 0.1]]})
    report = suites.run_case(c, config)
    assert not report.passed
    assert report.details['error'].startswith('ConstraintError')


def test_shift_element_against_zero_offset(config):
    params = {'chain': {'N': 1, 'spin': {'n_s': 0, 'nu_s': 0.1}},
              'x': [[0, 0.3]], 'xp': [[1, -0.2]], 'z0': '0.6+0.3j'}
    at_offset = suites.run_case(case('txx', params), config)
    at_zero = suites.run_case(case('txx', dict(params, reference='zero')),
                              config)
    p(at_offset.rhs, at_zero.rhs)
    assert at_offset.passed
    assert at_zero.lhs == at_offset.lhs
    assert at_zero.rhs == shift_element_closed(
        ChainConfig(1, Spin(0, 0.1)), [SeparatedPoint(0, 0.3)],
        [SeparatedPoint(1, -0.2)], 0.6 + 0.3j)
    with pytest.raises(ConfigError):
        suites.run_case(case('txx', dict(params, reference='nowhere')),
                        config)


def test_select(shipped):
    two = suites.select(shipped, N=2)
    assert two
    assert all(suites.chain_length(c) == 2 for c in two)
    assert {c['identity'] for c in suites.select(shipped, which='chain')} \
        == {'chain'}
    with pytest.raises(ConfigError):
        suites.select(shipped, which='chian')


def test_with_value():
    base = case('gustafson', {'x': [], 'chain': {'N': 1}})
    assert suites._with_value(base, 'n_max', 16)['params']['n_max'] == 16
    moved = suites._with_value(base, 'regularization', 0.1)
    assert moved['params']['chain'] == {'N': 1, 'regularization': 0.1}
    assert 'regularization' not in base['params']['chain']
    assert suites._with_value(base, 'target', 1e-2)['target'] == 1e-2
    assert moved['id'] == 'gustafson-test@regularization=0.1'


def test_run_cases_keeps_the_order(config):
    cases = [case('a_function', {'seed': seed, 'points': 20},
                  id='a-{}'.format(seed)) for seed in range(4)]
    reports = suites.run_cases(cases, config, progress=False)
    assert [r.case_id for r in reports] == ['a-0', 'a-1', 'a-2', 'a-3']


def test_sweep(config):
    grid = {'parameter': 'points', 'values': [10, 30],
            'case': {'seed': 1}}
    rows = suites.sweep('a_function', grid, config, progress=False)
    assert [value for value, _ in rows] == [10, 30]
    assert [r.evaluations for _, r in rows] == [10, 30]
    with pytest.raises(ConfigError):
        suites.sweep('a_function', {'parameter': 'points', 'values': [1]},
                     config)
    with pytest.raises(ConfigError):
        suites.sweep('nothing', grid, config)


def test_print_identities(capsys):
    suites.print_identities()
    out = capsys.readouterr().out
    for suite in suites.SUITES:
        assert '[{}]'.format(suite) in out
    assert 'mb_propagator' in out
