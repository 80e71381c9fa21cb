#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# report.py

"""
Verification reports.

One :class:`Report` per checked case. Reports are written as JSON lines (one
object per line, keys sorted) and summarized in an aligned text table.
"""

import datetime
import json
from collections import namedtuple

from .serialize import serializable
from .utils import rel_dev

_FIELDS = ['case_id', 'identity', 'anchor', 'lhs', 'rhs', 'rel_dev',
           'error_estimate', 'passed', 'evaluations', 'wall_ms', 'config',
           'details']


class Report(namedtuple('Report', _FIELDS)):

    """The outcome of checking one identity at one parameter point.

    ``passed`` holds exactly when the relative deviation is within the
    case's target and every numerical routine involved converged. ``anchor``
    names the formula being checked and must be nonempty.
    """

    __slots__ = ()

    def __new__(cls, case_id, identity, anchor, lhs, rhs, rel_dev,
                error_estimate, passed, evaluations=0, wall_ms=0, config=None,
                details=None):
        if not anchor:
            raise ValueError('invalid report: empty anchor for case '
                             '`{}`'.format(case_id))
        return super().__new__(cls, str(case_id), identity, anchor, lhs, rhs,
                               float(rel_dev), float(error_estimate),
                               bool(passed), int(evaluations), int(wall_ms),
                               dict(config or {}), dict(details or {}))

    @classmethod
    def compare(cls, case_id, identity, anchor, lhs, rhs, target,
                error_estimate=0.0, converged=True, **kwargs):
        """Build a report from the two sides of an identity.

        >>> r = Report.compare('c', 'chain', 'chain relation', 1.0, 1.0, 1e-6)
        >>> r.passed
        True
        """
        deviation = rel_dev(lhs, rhs)
        config = dict(kwargs.pop('config', None) or {})
        config.setdefault('target', target)
        return cls(case_id, identity, anchor, complex(lhs), complex(rhs),
                   deviation, error_estimate,
                   converged and deviation <= target, config=config, **kwargs)

    @classmethod
    def failure(cls, case_id, identity, anchor, error, target,
                estimate=None, **kwargs):
        """A report for a case whose evaluation raised a domain error."""
        details = dict(kwargs.pop('details', None) or {})
        details['error'] = '{}: {}'.format(type(error).__name__, error)
        config = dict(kwargs.pop('config', None) or {})
        config.setdefault('target', target)
        value = complex('nan') if estimate is None else complex(estimate)
        return cls(case_id, identity, anchor, value, complex('nan'),
                   float('inf'), float('inf'), False, config=config,
                   details=details, **kwargs)

    def serializable(self, timestamp=None):
        d = {
            'case_id': self.case_id,
            'identity': self.identity,
            'anchor': self.anchor,
            'lhs': self.lhs,
            'rhs': self.rhs,
            'rel_dev': self.rel_dev,
            'error_estimate': self.error_estimate,
            'pass': self.passed,
            'evaluations': self.evaluations,
            'wall_ms': self.wall_ms,
            'config': self.config,
            'details': self.details,
        }
        if timestamp is not None:
            d['timestamp'] = timestamp
        return serializable(d)


def dumps(report, timestamps=True):
    """One JSON line. With ``timestamps=False`` the wall time is dropped as
    well, so reruns are byte-identical."""
    d = report.serializable(
        timestamp=(datetime.datetime.now().isoformat() if timestamps
                   else None))
    if not timestamps:
        d['wall_ms'] = 0
    return json.dumps(d, sort_keys=True)


def write_jsonl(reports, f, timestamps=True):
    for report in reports:
        f.write(dumps(report, timestamps=timestamps) + '\n')


def summary_table(reports):
    """An aligned plain-text table with one row per report.

    >>> r = Report.compare('c1', 'chain', 'chain relation', 1.0, 1.0, 1e-6)
    >>> print(summary_table([r]).splitlines()[0].split())
    ['case', 'identity', 'rel_dev', 'error', 'evals', 'ms', 'result']
    """
    header = ('case', 'identity', 'rel_dev', 'error', 'evals', 'ms',
              'result')
    rows = [(r.case_id, r.identity, '{:.2e}'.format(r.rel_dev),
             '{:.2e}'.format(r.error_estimate), str(r.evaluations),
             str(r.wall_ms), 'pass' if r.passed else 'FAIL')
            for r in reports]
    widths = [max(len(row[i]) for row in [header] + rows)
              for i in range(len(header))]
    lines = ['  '.join(cell.ljust(width) for cell, width in zip(row, widths))
             .rstrip() for row in [header] + rows]
    passed = sum(r.passed for r in reports)
    lines.append('{}/{} passed'.format(passed, len(reports)))
    return '\n'.join(lines)
