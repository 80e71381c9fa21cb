#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# test_cli.py

import csv
import json
import os

import pytest
from docopt import docopt

from pysl2c import __main__ as cli
from pysl2c import data, validate
from pysl2c.constants import EXIT_CONFIG, EXIT_FAILED, EXIT_OK

GRIDS_DIR = os.path.join(os.path.dirname(os.path.dirname(
    os.path.abspath(__file__))), 'pysl2c', 'grids')

FAST_CASES = """\
cases:
  - id: a-function-small
    identity: a_function
    params: {seed: 2, points: 50}
  - id: orthogonality-gaps
    identity: orthogonality
    params:
      chain: {N: 1, spin: {n_s: 0, nu_s: 0.1}}
      x: [0, 0.3]
      xp: [1, 0.3]
"""


def run(*argv):
    return cli.main(docopt(cli.__doc__, argv=list(argv)))


@pytest.fixture()
def case_file(tmp_path):
    path = tmp_path / 'cases.yml'
    path.write_text(FAST_CASES)
    return str(path)


def test_list(capsys):
    assert run('list') == EXIT_OK
    out = capsys.readouterr().out
    assert '[gustafson]' in out
    assert 'a_function' in out


def test_verify_case_file(tmp_path, case_file, capsys):
    report_path = str(tmp_path / 'out' / 'report.jsonl')
    code = run('verify', 'all', '--case', case_file, '--report', report_path,
               '--quiet')
    out = capsys.readouterr().out
    print(out)
    assert code == EXIT_OK
    assert '2/2 passed' in out
    lines = data.read_reports(report_path)
    assert [line['case_id'] for line in lines] == ['a-function-small',
                                                    'orthogonality-gaps']
    assert all(line['pass'] for line in lines)


def test_verify_filters_the_case_file_by_suite(case_file, capsys):
    assert run('verify', 'specfun', '--case', case_file, '-q') == EXIT_OK
    assert '1/1 passed' in capsys.readouterr().out


def test_reports_are_reproducible(tmp_path, case_file):
    paths = [str(tmp_path / name) for name in ('a.jsonl', 'b.jsonl')]
    for path in paths:
        assert run('verify', 'all', '--case', case_file, '--report', path,
                   '--no-timestamps', '--workers', '2', '-q') == EXIT_OK
    with open(paths[0], 'rb') as a, open(paths[1], 'rb') as b:
        assert a.read() == b.read()


def test_failing_case_exits_one(case_file, capsys):
    code = run('verify', 'specfun', '--case', case_file, '--target', '1e-30',
               '-q')
    err = capsys.readouterr().err
    assert code == EXIT_FAILED
    assert 'FAIL a-function-small' in err


def test_pinched_contour_exits_one(tmp_path, capsys):
    path = tmp_path / 'pinched.yml'
    path.write_text(
        "cases:\n"
        "  - id: pinched\n"
        "    identity: gustafson\n"
        "    params:\n"
        "      x: [[0, '0.2-0.05j'], [0, '-0.4-0.05j']]\n"
        "      xp: [[0, '0.1-0.05j'], [0, '0.5-0.05j']]\n")
    assert run('verify', 'gustafson', '--case', str(path), '-q') == \
        EXIT_FAILED
    assert 'PoleOnContour' in capsys.readouterr().err


def test_malformed_case_file_exits_two(tmp_path, capsys):
    path = tmp_path / 'broken.yml'
    path.write_text('cases:\n  - id: a\n    params: {seed: [1, 2}\n')
    assert run('verify', 'all', '--case', str(path)) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert 'broken.yml' in err
    assert 'line 3' in err


def test_malformed_field_exits_two(tmp_path, capsys):
    path = tmp_path / 'field.yml'
    path.write_text("cases:\n"
                    "  - id: b\n"
                    "    identity: completeness_b\n"
                    "    params: {z: 'here', w: 0}\n")
    assert run('verify', 'sov', '--case', str(path), '-q') == EXIT_CONFIG
    assert '`z`' in capsys.readouterr().err


@pytest.mark.parametrize('argv', [
    ('verify', 'everything'),
    ('verify', 'relations', '--which', 'gustafson'),
    ('verify', 'all', '--budget', '-5'),
    ('verify', 'all', '--N', 'two'),
    ('verify', 'all', '--case', 'no/such/file.yml'),
])
def test_invalid_invocations_exit_two(argv, capsys):
    assert run(*argv) == EXIT_CONFIG
    assert capsys.readouterr().err.startswith('error: ')


def test_sweep(tmp_path):
    grid = tmp_path / 'grid.yml'
    grid.write_text('parameter: points\nvalues: [10, 20]\n'
                    'case: {seed: 0}\n')
    out = str(tmp_path / 'sweep.csv')
    assert run('sweep', 'a_function', '--grid', str(grid), '--out', out,
               '-q') == EXIT_OK
    with open(out) as f:
        rows = list(csv.reader(f))
    assert rows[0][:2] == ['points', 'case_id']
    assert [row[0] for row in rows[1:]] == ['10', '20']


def test_sweep_of_an_empty_grid_exits_two(tmp_path):
    grid = tmp_path / 'grid.yml'
    grid.write_text('parameter: n_max\nvalues: []\n')
    assert run('sweep', 'gustafson', '--grid', str(grid), '--out',
               str(tmp_path / 'sweep.csv')) == EXIT_CONFIG


@pytest.mark.slow
def test_verify_gustafson_two_points(capsys):
    assert run('verify', 'gustafson', '--N', '2', '-q') == EXIT_OK


@pytest.mark.slow
def test_verify_chain_relations():
    assert run('verify', 'relations', '--which', 'chain', '-q') == EXIT_OK


@pytest.mark.slow
def test_regularization_sweep_is_monotone(tmp_path):
    out = str(tmp_path / 'txx.csv')
    assert run('sweep', 'txx', '--grid',
               os.path.join(GRIDS_DIR, 'txx_regularization.yml'), '--out',
               out, '-q') == EXIT_OK
    with open(out) as f:
        rows = list(csv.DictReader(f))
    deviations = [float(row['rel_dev']) for row in rows]
    print(deviations)
    assert deviations == sorted(deviations, reverse=True)


@pytest.mark.slow
def test_n_max_sweep_converges(tmp_path):
    out = str(tmp_path / 'gustafson.csv')
    assert run('sweep', 'gustafson', '--grid',
               os.path.join(GRIDS_DIR, 'gustafson_n_max.yml'), '--out', out,
               '-q') == EXIT_OK
    with open(out) as f:
        rows = {int(row['n_max']): row for row in csv.DictReader(f)}
    print(rows)
    assert float(rows[32]['rel_dev']) < 1e-4
    assert float(rows[64]['rel_dev']) < 1e-4


def test_shipped_grids_are_valid():
    for name in os.listdir(GRIDS_DIR):
        grid = data.load_grid(os.path.join(GRIDS_DIR, name))
        assert validate.grid(grid) is grid
        assert 'case' in grid


def test_report_lines_are_json(tmp_path, case_file):
    path = str(tmp_path / 'report.jsonl')
    run('verify', 'specfun', '--case', case_file, '--report', path, '-q')
    with open(path) as f:
        line = json.loads(f.readline())
    assert 'timestamp' in line
    assert line['identity'] == 'a_function'
