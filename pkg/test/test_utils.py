#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# test_utils.py

import datetime
import math

import pytest

from conftest import p
from pysl2c.utils import (compress, ensure_exists, i_power, minus_one_power,
                          rel_dev, wynn_epsilon)


@pytest.mark.parametrize('n', range(-9, 10))
def test_i_power_is_exact(n):
    assert i_power(n) == 1j ** (n % 4)
    assert minus_one_power(n) == (-1) ** n


def test_rel_dev():
    assert rel_dev(1 + 1e-9, 1) == pytest.approx(1e-9)
    assert rel_dev(3j, 0) == 3
    assert rel_dev(0, 0) == 0


def test_wynn_epsilon_alternating_series():
    sums = [sum((-1) ** k / (2 * k + 1) for k in range(n))
            for n in range(1, 16)]
    value, error = wynn_epsilon(sums)
    p(value, math.pi / 4)
    assert abs(value - math.pi / 4) < 1e-9
    assert error < 1e-6


def test_wynn_epsilon_short_and_exact_sequences():
    assert wynn_epsilon([2.0]) == (2.0, math.inf)
    assert wynn_epsilon([1.0, 1.5]) == (1.5, 0.5)
    value, error = wynn_epsilon([1.0, 1.0, 1.0, 1.0])
    assert value == 1
    assert error == 0
    with pytest.raises(ValueError):
        wynn_epsilon([])


def test_wynn_epsilon_oscillatory_integral_pieces():
    # Partial integrals of sin(x)/x over half-periods.
    pieces = [(-1) ** k * 2 / (math.pi * (k + 0.5)) for k in range(12)]
    sums = [sum(pieces[:n]) for n in range(1, 13)]
    value, _ = wynn_epsilon(sums)
    direct = sum((-1) ** k * 2 / (math.pi * (k + 0.5)) for k in range(200000))
    assert abs(value - direct) < 1e-5


def test_compress():
    assert compress(0) == '0.00s'
    assert compress(60) == '1m'
    assert compress(datetime.timedelta(weeks=1, seconds=5)) == '1w5s'


def test_ensure_exists(tmp_path):
    path = str(tmp_path / 'a' / 'b')
    assert ensure_exists(path) == path
    assert ensure_exists(path) == path
