#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# utils.py

"""
Utility functions.
"""

import datetime
import math
import os

from .constants import DAYS, HOURS, I_POWERS, MINUTES, WEEKS


def ensure_exists(path):
    """Makes a path if it doesn't exist and returns it."""
    os.makedirs(path, exist_ok=True)
    return path


def i_power(n):
    """Return ``i**n`` exactly for an integer ``n``.

    >>> i_power(5)
    1j
    >>> i_power(-1) == -1j
    True
    """
    return complex(I_POWERS[int(n) % 4])


def minus_one_power(n):
    """Return ``(-1)**n`` for an integer ``n``.

    >>> minus_one_power(-3)
    -1
    """
    return -1 if int(n) % 2 else 1


def rel_dev(a, b):
    """Relative deviation of ``a`` from ``b``.

    Falls back to the absolute deviation when ``b`` vanishes.

    >>> rel_dev(1.0, 1.0)
    0.0
    >>> rel_dev(2.0, 0.0)
    2.0
    """
    scale = abs(b)
    diff = abs(a - b)
    return diff / scale if scale > 0 else diff


def wynn_epsilon(partial_sums):
    """Accelerate a sequence of partial sums with Wynn's epsilon algorithm.

    Args:
        partial_sums (Iterable(complex)): The partial sums, in order.

    Returns:
        tuple(complex, float): The accelerated limit and an error estimate
        taken as the distance between the two highest-order estimates.

    >>> import math
    >>> sums = [sum((-1)**k / (k + 1) for k in range(n)) for n in range(1, 12)]
    >>> value, error = wynn_epsilon(sums)
    >>> abs(value - math.log(2)) < 1e-7
    True
    """
    sums = [complex(s) for s in partial_sums]
    if not sums:
        raise ValueError('invalid partial sums: empty sequence')
    if len(sums) < 3:
        error = abs(sums[-1] - sums[-2]) if len(sums) == 2 else math.inf
        return sums[-1], error
    previous = [0j] * (len(sums) + 1)
    current = list(sums)
    estimates = [sums[-2], sums[-1]]
    order = 0
    while len(current) > 1:
        following = []
        for j in range(len(current) - 1):
            diff = current[j + 1] - current[j]
            if diff == 0:
                # The column has converged exactly.
                return current[j + 1], abs(estimates[-1] - current[j + 1])
            following.append(previous[j + 1] + 1 / diff)
        order += 1
        if order % 2 == 0:
            estimates.append(following[-1])
        previous, current = current, following
    return estimates[-1], abs(estimates[-1] - estimates[-2])


def compress(t):
    """Convert a number of seconds to a compressed duration string.

    >>> compress(1)
    '1s'
    >>> compress(123)
    '2m3s'
    >>> compress(123456)
    '1d10h17m36s'
    >>> compress(0.25)
    '0.25s'
    """
    if not isinstance(t, datetime.timedelta):
        t = datetime.timedelta(seconds=t)
    seconds = t.seconds + t.days * DAYS
    parts = []
    for unit, width in (('w', WEEKS), ('d', DAYS), ('h', HOURS),
                        ('m', MINUTES)):
        count, seconds = divmod(seconds, width)
        if count:
            parts.append('{}{}'.format(count, unit))
    if seconds:
        parts.append('{}s'.format(seconds))
    if not parts:
        parts = ['{:.2f}s'.format(t.microseconds / 1000000)]
    return ''.join(parts)
