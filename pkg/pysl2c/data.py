#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# data.py

"""Case files, sweep grids and report files."""

import csv
import json
import os
from glob import glob

import yaml
from tqdm import tqdm

from . import report, suites, validate
from .constants import CASES_DIR
from .exceptions import ConfigError
from .utils import ensure_exists


def _load_yaml(filepath, what):
    try:
        with open(filepath, 'rt') as f:
            return yaml.safe_load(f)
    except OSError as e:
        raise ConfigError('cannot read {} `{}`: {}'.format(
            what, filepath, e.strerror)) from e
    except yaml.YAMLError as e:
        raise ConfigError('invalid {} `{}`: {}'.format(what, filepath,
                                                        e)) from e


def load_case_file(filepath):
    """Load and validate one YAML case file.

    Returns:
        list(dict): The cases, each with ``id``, ``identity`` and
        ``params``.
    """
    d = _load_yaml(filepath, 'case file')
    validate.case_file(d, suites.metadata, source=filepath)
    return d['cases']


def load_suite(suite, directory=CASES_DIR):
    """Load the shipped cases of a suite (``all`` for every suite).

    The cases of ``<suite>*.yml`` in ``directory`` are returned sorted by
    file name, in file order.
    """
    names = suites.SUITES if suite == 'all' else [suite]
    suites.identities(suite)
    cases = []
    for name in names:
        paths = sorted(glob(os.path.join(directory, name + '*.yml')))
        for path in tqdm(paths, leave=False, dynamic_ncols=True,
                         disable=len(paths) < 2):
            cases.extend(load_case_file(path))
    ids = [case['id'] for case in cases]
    if len(set(ids)) != len(ids):
        raise ConfigError('duplicate case ids in suite `{}`'.format(suite))
    return cases


def shipped_case(identity, directory=CASES_DIR):
    """The first shipped case of ``identity``, or ``None``."""
    for case in load_suite('all', directory):
        if case['identity'] == identity:
            return case
    return None


def load_grid(filepath):
    return validate.grid(_load_yaml(filepath, 'grid file'), source=filepath)


def write_reports(reports, filepath=None, timestamps=True, stream=None):
    """Write reports as JSON lines to ``filepath``, or to ``stream``."""
    if filepath is None:
        report.write_jsonl(reports, stream, timestamps=timestamps)
        return
    ensure_exists(os.path.dirname(os.path.abspath(filepath)))
    with open(filepath, 'wt') as f:
        report.write_jsonl(reports, f, timestamps=timestamps)


def read_reports(filepath, check=True):
    """Read a JSON-lines report file back as dicts.

    With ``check``, each line is validated against the shipped schema.
    """
    schema = validate.load_report_schema() if check else None
    with open(filepath, 'rt') as f:
        lines = [json.loads(line) for line in f if line.strip()]
    if check:
        for line in lines:
            validate.report_line(line, schema)
    return lines


CSV_COLUMNS = ['value', 'case_id', 'rel_dev', 'error_estimate', 'passed',
               'evaluations', 'wall_ms', 'error']


def write_csv(rows, filepath, parameter):
    """Write ``(value, Report)`` pairs of a sweep as CSV.

    The first column is named after the swept parameter.
    """
    ensure_exists(os.path.dirname(os.path.abspath(filepath)))
    with open(filepath, 'wt', newline='') as f:
        writer = csv.writer(f)
        writer.writerow([parameter] + CSV_COLUMNS[1:])
        for value, r in rows:
            writer.writerow([value, r.case_id, r.rel_dev, r.error_estimate,
                             r.passed, r.evaluations, r.wall_ms,
                             r.details.get('error', '')])
