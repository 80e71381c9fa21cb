#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# test_planequad.py

import cmath
import math

import mpmath
import numpy as np
import pytest
from scipy import special

from conftest import p
from pysl2c.exceptions import NonConvergence, PlanError
from pysl2c.planequad import (IntegralEstimate, QuadPlan, Singularity,
                              integrate_exterior, integrate_interval,
                              integrate_plane, integrate_radial_oscillatory)
from pysl2c.specfun import BiIndex, a_product, power_bi
from pysl2c.utils import minus_one_power


def gaussian(z):
    return np.exp(-np.abs(z) ** 2) / math.pi


def test_gaussian_calibration():
    plan = QuadPlan(decay_at_infinity=4, target_rel_error=1e-12)
    result = integrate_plane(gaussian, plan)
    p(result, 1)
    assert result.converged
    assert abs(result.value - 1) < 1e-10


@pytest.mark.parametrize('k', range(5))
def test_polynomial_times_gaussian(k):
    def f(z):
        return np.abs(z) ** (2 * k) * np.exp(-np.abs(z) ** 2)

    plan = QuadPlan(decay_at_infinity=4, target_rel_error=1e-12)
    result = integrate_plane(f, plan).value
    answer = math.pi * math.factorial(k)
    p(result, answer)
    assert abs(result - answer) < 1e-10 * answer


def test_off_center_monomial_gaussian():
    # Shifted x^2 y^2 moment: int x^2 y^2 e^{-|z|^2} = pi / 4.
    shift = 0.7 - 0.4j

    def f(z):
        w = z - shift
        return w.real ** 2 * w.imag ** 2 * np.exp(-np.abs(w) ** 2)

    plan = QuadPlan(decay_at_infinity=6, target_rel_error=1e-12)
    result = integrate_plane(f, plan).value
    assert abs(result - math.pi / 4) < 1e-10


def chain_closed_form(alpha, beta, z1, z2):
    gamma = 2 - alpha - beta
    return (math.pi * minus_one_power(gamma.n) *
            a_product([alpha, beta, gamma]) *
            power_bi(z1 - z2, 1 - alpha - beta))


@pytest.mark.parametrize('alpha,beta', [
    (BiIndex(0.6), BiIndex(0.6)),
    (BiIndex(0.8 + 0.1j, -0.2 + 0.1j), BiIndex(0.85)),
])
def test_chain_integral(alpha, beta):
    z1, z2 = 0.3 + 0.2j, -0.5 + 0.1j

    def f(w):
        return power_bi(z1 - w, -alpha) * power_bi(w - z2, -beta)

    plan = QuadPlan([Singularity(z1, alpha), Singularity(z2, beta)],
                    decay_at_infinity=alpha + beta, target_rel_error=1e-8)
    result = integrate_plane(f, plan)
    answer = chain_closed_form(alpha, beta, z1, z2)
    p(result.value, answer)
    assert abs(result.value - answer) < 1e-6 * abs(answer)
    assert result.abs_error_estimate <= 1e-8 * abs(result.value)


def test_determinism():
    alpha = BiIndex(0.6)
    z1, z2 = 0.3 + 0.2j, -0.5 + 0.1j

    def f(w):
        return power_bi(z1 - w, -alpha) * power_bi(w - z2, -alpha)

    plan = QuadPlan([(z1, alpha), (z2, alpha)], decay_at_infinity=2.4)
    first = integrate_plane(f, plan)
    second = integrate_plane(f, plan)
    assert first.value == second.value
    assert first.evaluations == second.evaluations


def test_subdivision_invariance():
    alpha = BiIndex(0.7)

    def f(w):
        return power_bi(w, -alpha) * np.exp(-np.abs(w - 0.5) ** 2)

    plan = QuadPlan([(0, alpha)], decay_at_infinity=6, target_rel_error=1e-6)
    coarse = integrate_plane(f, plan)
    fine = integrate_plane(f, plan.tightened(2))
    assert abs(coarse.value - fine.value) <= (coarse.abs_error_estimate +
                                              fine.abs_error_estimate)


def test_plan_rejects_non_integrable_singularity():
    with pytest.raises(PlanError):
        QuadPlan([Singularity(0, BiIndex(1.0))], decay_at_infinity=3)


def test_plan_rejects_slow_decay():
    with pytest.raises(PlanError):
        QuadPlan(decay_at_infinity=2.0)
    # An oscillatory plan may decay slower.
    plan = QuadPlan(decay_at_infinity=1.0, oscillation=1j)
    assert plan.oscillation == 1j


def test_plan_rejects_repeated_points():
    with pytest.raises(PlanError):
        QuadPlan([(0, 0.5), (0, 0.3)], decay_at_infinity=3)


def test_budget_exhaustion_keeps_estimate():
    alpha = BiIndex(0.9 + 0.5j)

    def f(w):
        return power_bi(w, -alpha) * power_bi(w - 1, -alpha)

    plan = QuadPlan([(0, alpha), (1, alpha)], decay_at_infinity=3.6,
                    target_rel_error=1e-14, max_evaluations=225)
    with pytest.raises(NonConvergence) as excinfo:
        integrate_plane(f, plan)
    estimate = excinfo.value.estimate
    assert isinstance(estimate, IntegralEstimate)
    assert not estimate.converged
    assert estimate.abs_error_estimate >= 0


def test_integrate_interval_endpoint_singularity():
    result = integrate_interval(lambda x: 1 / np.sqrt(x), 0, 1,
                                target_rel_error=1e-10)
    assert abs(result.value - 2) < 1e-9


def test_integrate_interval_breakpoints_and_vectors():
    def f(x):
        return np.stack([np.abs(x - 0.3), np.exp(1j * x)], axis=1)

    result = integrate_interval(f, 0, 1, breakpoints=[0.3])
    answer = np.array([0.3 ** 2 / 2 + 0.7 ** 2 / 2,
                       (cmath.exp(1j) - 1) / 1j])
    assert np.allclose(result.value, answer, rtol=1e-12, atol=1e-14)


def test_exterior_inversion_chart():
    result = integrate_exterior(lambda z: np.abs(z) ** -3.0, 1.0, 3.0)
    p(result.value, 2 * math.pi)
    assert abs(result.value - 2 * math.pi) < 1e-9


def test_exterior_matches_truncation_extrapolation():
    # Chain-relation tail: |z|^{-2.4} smooth part on |z| > R, compared with
    # the annulus integral plus the analytic remainder.
    alpha = BiIndex(0.6)
    z1, z2 = 0.3 + 0.2j, -0.5 + 0.1j

    def f(w):
        return power_bi(z1 - w, -alpha) * power_bi(w - z2, -alpha)

    radius, outer = 3.0, 60.0
    chart = integrate_exterior(f, radius, 2.4, target_rel_error=1e-10)

    def annulus(r):
        theta = np.linspace(0, 2 * math.pi, 257)[:-1]
        z = r[:, None] * np.exp(1j * theta)[None, :]
        return r * f(z.ravel()).reshape(z.shape).mean(axis=1) * 2 * math.pi

    inner = integrate_interval(annulus, radius, outer, target_rel_error=1e-11)
    # Leading tail term |w|^{-2.4} beyond the outer radius; odd orders of
    # the expansion average out over angles, so the remainder is O(R^{-2.4}).
    tail = 2 * math.pi * outer ** -0.4 / 0.4
    outer2 = 2 * outer
    inner2 = integrate_interval(annulus, radius, outer2,
                                target_rel_error=1e-11)
    tail2 = 2 * math.pi * outer2 ** -0.4 / 0.4
    weight = 2 ** -2.4
    first, second = inner.value + tail, inner2.value + tail2
    extrapolated = (second - weight * first) / (1 - weight)
    p(chart.value, extrapolated)
    assert abs(chart.value - extrapolated) < 1e-7 * abs(chart.value)


def hankel_power(mu, order):
    """int_0^inf r^mu J_order(2 r) dr for order >= 0."""
    return complex(mpmath.gamma((1 + order + mu) / 2) /
                   (2 * mpmath.gamma((1 + order - mu) / 2)))


def test_fourier_of_half_propagator():
    # pi a(1/2) [1]^{-1/2} = pi.
    plan = QuadPlan([(0, BiIndex(0.5))], decay_at_infinity=1.0,
                    oscillation=1, target_rel_error=1e-10)
    radial = integrate_radial_oscillatory(lambda r: 1 / r, 0, 1.0, plan)
    result = 2 * math.pi * radial.value
    p(result, math.pi)
    assert abs(result - math.pi) < 1e-8


def test_fourier_with_gap():
    alpha = BiIndex(1.2, 0.2)
    momentum = 1j
    plan = QuadPlan([(0, alpha)], decay_at_infinity=alpha,
                    oscillation=momentum, target_rel_error=1e-9)
    order = -alpha.n
    radial = integrate_radial_oscillatory(
        lambda r: r ** -alpha.total.real, order, abs(momentum), plan)
    result = (2 * math.pi * 1j ** order *
              cmath.exp(-1j * order * cmath.phase(momentum)) * radial.value)
    answer = (math.pi * 1j ** alpha.n * a_product([alpha]) *
              power_bi(momentum, alpha - 1))
    p(result, answer)
    assert abs(result - answer) < 1e-7 * abs(answer)


def test_radial_oscillatory_against_hankel_formula():
    plan = QuadPlan([(0, BiIndex(0.35))], decay_at_infinity=0.7,
                    oscillation=1, target_rel_error=1e-9)
    result = integrate_radial_oscillatory(lambda r: r ** -0.7, 2, 1.0, plan)
    answer = hankel_power(0.3, 2)
    p(result.value, answer)
    assert abs(result.value - answer) < 1e-7 * abs(answer)


def test_radial_oscillatory_laplace_type():
    plan = QuadPlan(decay_at_infinity=4, oscillation=1)
    result = integrate_radial_oscillatory(lambda r: np.exp(-r), 0, 1.0, plan)
    oracle = integrate_interval(
        lambda r: r * np.exp(-r) * special.j0(2 * r), 0, 60,
        target_rel_error=1e-12)
    # int_0^inf r e^{-r} J0(2r) dr = 1 / (1 + 4)^{3/2}.
    answer = 5 ** -1.5
    p(result.value, answer)
    assert abs(result.value - answer) < 1e-9
    assert abs(oracle.value - answer) < 1e-9


def test_oscillatory_plane_integral():
    alpha = BiIndex(0.75)
    momentum = 0.8 + 0.6j
    z0 = 0.3 - 0.2j

    def f(z):
        return power_bi(z - z0, -alpha)

    plan = QuadPlan([(z0, alpha)], decay_at_infinity=alpha,
                    oscillation=momentum, target_rel_error=1e-7)
    result = integrate_plane(f, plan)
    answer = (cmath.exp(2j * (momentum * z0).real) * math.pi *
              a_product([alpha]) * power_bi(momentum, alpha - 1))
    p(result.value, answer)
    assert abs(result.value - answer) < 1e-6 * abs(answer)
