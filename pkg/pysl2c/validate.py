#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# validate.py

"""
Validation of configuration, case files, sweep grids and report lines.

All failures raise :class:`~pysl2c.exceptions.ConfigError`, which the CLI maps
to exit code 2.
"""

import json
from numbers import Number

import jsonschema

from . import constants
from .exceptions import ConfigError

REQUIRED_CONFIG_KEYS = {'budget', 'workers', 'regularization', 'tolerances',
                        'mb'}
REQUIRED_TOLERANCE_KEYS = {'specfun', 'relations', 'cross', 'fourier', 'sov',
                           'sov_n2', 'gustafson', 'mb', 'completeness'}
REQUIRED_MB_KEYS = {'n_max', 'nu_cutoff'}
REQUIRED_CASE_FILE_KEYS = {'cases'}
REQUIRED_CASE_KEYS = {'id', 'identity', 'params'}
REQUIRED_GRID_KEYS = {'parameter', 'values'}


def _assert_ordering(ordering, text):
    def assertion(dictionary, name, key, threshold):
        if not ordering(dictionary[key], threshold):
            raise ConfigError('invalid {}: `{}` must be {} '
                              '{}.'.format(name, key, text, threshold))
    return assertion

_assert_le = _assert_ordering(lambda a, b: a <= b, 'less than or equal to')
_assert_ge = _assert_ordering(lambda a, b: a >= b, 'greater than or equal to')
_assert_lt = _assert_ordering(lambda a, b: a < b, 'less than')
_assert_gt = _assert_ordering(lambda a, b: a > b, 'greater than')


def _assert_nonempty_dict(d, name):
    if not isinstance(d, dict):
        raise ConfigError('invalid {}: must be a mapping.'.format(name))
    if not d:
        raise ConfigError('invalid {}: empty mapping.'.format(name))


def _assert_has_keys(d, required, name):
    missing = required - set(d.keys())
    if missing:
        raise ConfigError(
            'invalid {}: missing `{}`.'.format(name,
                                               '`, `'.join(sorted(missing))))


def _assert_number(d, name, key):
    if isinstance(d[key], bool) or not isinstance(d[key], Number):
        raise ConfigError('invalid {}: `{}` must be a number, got '
                          '`{!r}`.'.format(name, key, d[key]))


def config(d):
    """Validate a run configuration in place and return it."""
    name = 'configuration'
    _assert_nonempty_dict(d, name)
    _assert_has_keys(d, REQUIRED_CONFIG_KEYS, name)
    for key in ('budget', 'workers', 'regularization'):
        _assert_number(d, name, key)
    _assert_ge(d, name, 'budget', 1)
    _assert_ge(d, name, 'workers', 1)
    _assert_gt(d, name, 'regularization', 0)
    _assert_lt(d, name, 'regularization', 0.5)
    tolerances = d['tolerances']
    _assert_nonempty_dict(tolerances, 'tolerances')
    _assert_has_keys(tolerances, REQUIRED_TOLERANCE_KEYS, 'tolerances')
    for key in tolerances:
        _assert_number(tolerances, 'tolerances', key)
        _assert_gt(tolerances, 'tolerances', key, 0)
    _assert_nonempty_dict(d['mb'], 'mb')
    _assert_has_keys(d['mb'], REQUIRED_MB_KEYS, 'mb')
    for key in REQUIRED_MB_KEYS:
        _assert_number(d['mb'], 'mb', key)
    _assert_ge(d['mb'], 'mb', 'n_max', 1)
    _assert_gt(d['mb'], 'mb', 'nu_cutoff', 0)
    return d


def case_file(d, identities, source='case file'):
    """Validate a loaded case file.

    Args:
        d (dict): The parsed file.
        identities (Iterable(str)): Names of the registered identities.

    Keyword Args:
        source (str): Used in error messages (usually the path).
    """
    _assert_nonempty_dict(d, source)
    _assert_has_keys(d, REQUIRED_CASE_FILE_KEYS, source)
    if not isinstance(d['cases'], list) or not d['cases']:
        raise ConfigError(
            'invalid {}: `cases` must be a nonempty list.'.format(source))
    seen = set()
    for i, case in enumerate(d['cases']):
        name = '{} (case {})'.format(source, i)
        _assert_nonempty_dict(case, name)
        _assert_has_keys(case, REQUIRED_CASE_KEYS, name)
        if case['identity'] not in identities:
            raise ConfigError('invalid {}: unknown identity `{}`.'.format(
                name, case['identity']))
        if case['id'] in seen:
            raise ConfigError('invalid {}: duplicate id `{}`.'.format(
                name, case['id']))
        seen.add(case['id'])
        if not isinstance(case['params'], dict):
            raise ConfigError(
                'invalid {}: `params` must be a mapping.'.format(name))
        if 'target' in case:
            _assert_number(case, name, 'target')
            _assert_gt(case, name, 'target', 0)
    return d


def grid(d, source='grid file'):
    """Validate a sweep grid: one parameter name and its nonempty values."""
    _assert_nonempty_dict(d, source)
    _assert_has_keys(d, REQUIRED_GRID_KEYS, source)
    if not isinstance(d['values'], list) or not d['values']:
        raise ConfigError(
            'invalid {}: `values` must be a nonempty list.'.format(source))
    for value in d['values']:
        if isinstance(value, bool) or not isinstance(value, Number):
            raise ConfigError('invalid {}: grid value `{!r}` is not a '
                              'number.'.format(source, value))
    if 'case' in d and not isinstance(d['case'], dict):
        raise ConfigError(
            'invalid {}: `case` must be a mapping.'.format(source))
    return d


def load_report_schema(path=constants.REPORT_SCHEMA_PATH):
    with open(path) as f:
        return json.load(f)


def report_line(d, schema):
    """Check one serialized report against the shipped JSON Schema."""
    try:
        jsonschema.validate(instance=d, schema=schema)
    except jsonschema.SchemaError as e:
        raise ConfigError('invalid report schema: {}.'.format(
            e.message)) from e
    except jsonschema.ValidationError as e:
        where = '.'.join(str(k) for k in e.absolute_path)
        raise ConfigError('invalid report line{}: {}.'.format(
            ' at `{}`'.format(where) if where else '', e.message)) from e
    return d
