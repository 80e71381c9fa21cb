#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# constants.py

"""
Container for package-level constants.
"""

import os

# A point closer than this to a pole of Gamma is treated as the pole.
POLE_TOL = 1e-9
# Allowed float slack on the integer gap of a bi-index.
GAP_TOL = 1e-9
# Default imaginary offset given to ket-side separated variables.
DEFAULT_REGULARIZATION = 0.05
# Offsets used by the regularization sweep, largest first.
REGULARIZATION_SWEEP = (0.1, 0.05, 0.025)

# Exact powers of the imaginary unit, indexed by exponent mod 4.
I_POWERS = (1, 1j, -1, -1j)

CONFIG_FILENAME = 'pysl2c_config.yml'
DEFAULT_CONFIG_PATH = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
    CONFIG_FILENAME)
CASES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'cases')
REPORT_SCHEMA_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                                  'report_schema.json')
BUDGET_ENV_VAR = 'PYSL2C_BUDGET'

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

MINUTES = 60
HOURS = 60 * MINUTES
DAYS = 24 * HOURS
WEEKS = 7 * DAYS
