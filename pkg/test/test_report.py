#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# test_report.py

import io
import json
from fractions import Fraction

import numpy as np
import pytest

from conftest import p
from pysl2c import report, validate
from pysl2c.exceptions import ConfigError, PoleOnContour
from pysl2c.report import Report
from pysl2c.serialize import serializable
from pysl2c.specfun import BiIndex, SeparatedPoint


@pytest.fixture()
def schema():
    return validate.load_report_schema()


@pytest.fixture()
def passing():
    return Report.compare('c1', 'chain', 'chain relation', 1 + 1e-8, 1.0,
                          1e-6, error_estimate=1e-9, evaluations=120,
                          wall_ms=15, details={'x': SeparatedPoint(1, 0.3)})


def test_compare(passing):
    assert passing.passed
    assert passing.rel_dev == pytest.approx(1e-8)
    assert passing.config == {'target': 1e-6}
    assert passing.lhs == 1 + 1e-8


def test_compare_needs_convergence():
    r = Report.compare('c', 'chain', 'chain relation', 1.0, 1.0, 1e-6,
                       converged=False)
    assert r.rel_dev == 0
    assert not r.passed


def test_empty_anchor_is_rejected():
    with pytest.raises(ValueError):
        Report.compare('c', 'chain', '', 1.0, 1.0, 1e-6)


def test_failure_names_the_error():
    r = Report.failure('g', 'gustafson', 'Gustafson integral',
                       PoleOnContour('pole ladder of `u1` on the contour'),
                       1e-4)
    p(r.details, 'PoleOnContour')
    assert not r.passed
    assert r.details['error'].startswith('PoleOnContour: ')
    assert '`u1`' in r.details['error']
    assert r.config['target'] == 1e-4


def test_serializable_exact_values():
    d = serializable({'z': 0.5 - 2j, 'q': Fraction(-1, 3),
                      'a': np.array([1 + 1j, 2]), 'n': np.int64(3),
                      'b': BiIndex(0.8, -0.2)})
    assert d == {'z': [0.5, -2.0], 'q': [-1, 3],
                 'a': [[1.0, 1.0], [2.0, 0.0]], 'n': 3,
                 'b': {'alpha': [0.8, 0.0], 'alpha_bar': [-0.2, 0.0],
                       'n': 1}}
    json.dumps(d)


def test_dumps_without_timestamps_is_reproducible(passing):
    first = report.dumps(passing, timestamps=False)
    assert first == report.dumps(passing, timestamps=False)
    line = json.loads(first)
    assert 'timestamp' not in line
    assert line['wall_ms'] == 0
    assert line['pass'] is True
    assert line['lhs'] == [1 + 1e-8, 0.0]
    assert line['details']['x'] == {'n': 1, 'nu': [0.3, 0.0]}


def test_dumps_with_timestamps(passing):
    line = json.loads(report.dumps(passing))
    assert line['wall_ms'] == 15
    assert isinstance(line['timestamp'], str)


def test_report_lines_match_the_schema(passing, schema):
    failed = Report.failure('g', 'gustafson', 'Gustafson integral',
                            PoleOnContour('pinched'), 1e-4)
    f = io.StringIO()
    report.write_jsonl([passing, failed], f)
    lines = f.getvalue().splitlines()
    assert len(lines) == 2
    for line in lines:
        validate.report_line(json.loads(line), schema)


@pytest.mark.parametrize('key, value', [
    ('anchor', ''),
    ('pass', 'yes'),
    ('evaluations', -1),
    ('evaluations', 1.5),
    ('lhs', ['a', 'b']),
    ('lhs', [1.0]),
    ('stray', 1),
])
def test_schema_rejects_bad_lines(passing, schema, key, value):
    line = json.loads(report.dumps(passing))
    line[key] = value
    with pytest.raises(ConfigError):
        validate.report_line(line, schema)


def test_schema_requires_every_field(passing, schema):
    line = json.loads(report.dumps(passing))
    del line['rel_dev']
    with pytest.raises(ConfigError) as excinfo:
        validate.report_line(line, schema)
    assert "'rel_dev' is a required property" in str(excinfo.value)


def test_summary_table(passing):
    failed = Report.compare('c2', 'star', 'star-triangle relation', 1.1, 1.0,
                            1e-6)
    table = report.summary_table([passing, failed])
    print(table)
    lines = table.splitlines()
    assert lines[1].split()[-1] == 'pass'
    assert lines[2].split()[-1] == 'FAIL'
    assert lines[-1] == '1/2 passed'
    # Columns are aligned.
    assert lines[1].index('chain') == lines[2].index('star')
