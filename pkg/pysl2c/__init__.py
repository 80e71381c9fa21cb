#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# __init__.py

"""
pysl2c
~~~~~~

Numerical and symbolic verification of the separation-of-variables calculus
for the homogeneous SL(2,C) spin magnet: a-function algebra, two-dimensional
diagram rewriting, eigenfunction matrix elements and complex-field
Mellin-Barnes (Gustafson-type) integrals.
"""

import logging

from .__about__ import __version__

logging.getLogger(__name__).addHandler(logging.NullHandler())
