#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# serialize.py

"""
Recursively convert NumPy, complex and rational values to JSON-native types
and call a serialization method on objects if available.
"""

import math
import sys
from collections.abc import Iterable
from fractions import Fraction

import numpy as np


def serializable(obj, method='serializable', nan_to_num=True, **kwargs):
    """Return a serializable representation of an object.

    Complex numbers become ``[re, im]`` and fractions ``[num, den]``, so
    report lines and golden files stay exact and plain JSON.

    ``inf``, ``-inf``, and ``NaN`` values are converted by default to a very
    large number, a very small number, and zero, respectively. This can be
    disabled with the ``nan_to_num`` keyword argument.

    If ``obj`` has ``method``, then further keyword arguments are passed to it
    (but they are not passed recursively.)

    >>> serializable({'z': 1 + 2j, 'q': Fraction(1, 3)})
    {'z': [1.0, 2.0], 'q': [1, 3]}
    """
    if method is not None and hasattr(obj, method):
        return serializable(getattr(obj, method)(**kwargs),
                            nan_to_num=nan_to_num)
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return [serializable(complex(x), nan_to_num=nan_to_num)
                    for x in obj.ravel()]
        return (np.nan_to_num(obj) if nan_to_num else obj).tolist()
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return [obj.numerator, obj.denominator]
    if isinstance(obj, (complex, np.complexfloating)):
        return [_float(obj.real, nan_to_num), _float(obj.imag, nan_to_num)]
    if isinstance(obj, (float, np.floating)):
        return _float(obj, nan_to_num)
    if isinstance(obj, dict):
        return {key: serializable(value, nan_to_num=nan_to_num)
                for key, value in obj.items()}
    # Namedtuples serialize as their field mapping.
    if isinstance(obj, tuple) and hasattr(obj, '_asdict'):
        return serializable(dict(obj._asdict()), nan_to_num=nan_to_num)
    if isinstance(obj, str):
        return obj
    if isinstance(obj, Iterable):
        return [serializable(item, nan_to_num=nan_to_num) for item in obj]
    if hasattr(obj, '__dict__'):
        return serializable(vars(obj), nan_to_num=nan_to_num)
    return obj


def _float(x, nan_to_num):
    x = float(x)
    if nan_to_num:
        if math.isnan(x):
            return 0.0
        if x == float('inf'):
            return sys.float_info.max
        if x == float('-inf'):
            return -sys.float_info.max
    return x
