#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import os

import numpy as np
import pytest

collect_ignore = [
    "setup.py",
]
# Also ignore everything that git ignores.
git_ignore = os.path.join(os.path.dirname(__file__), '.gitignore')
collect_ignore += list(filter(None, open(git_ignore).read().split('\n')))


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='run slow tests')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: mark test as slow to run')
    # Doctests expect NumPy 1.x scalar reprs (``True``, not ``np.True_``).
    if np.lib.NumpyVersion(np.__version__) >= '2.0.0':
        np.set_printoptions(legacy='1.25')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='need --runslow option to run')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


def p(result, answer):
    print('Result:')
    print(result)
    print('Answer:')
    print(answer)
