#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# suites.py

"""
Registered identities and the suites that group them.

Every identity takes a case id, the ``params`` mapping of a case, its target
and the run configuration, and returns a
:class:`~pysl2c.report.Report`.
"""

import logging
import textwrap
import time
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from tqdm import tqdm

from . import diagrams, mellinbarnes, sov, specfun, symalg
from .constants import REGULARIZATION_SWEEP
from .exceptions import (ConfigError, ConstraintError, NonConvergence,
                         PatternError, PlanError, PoleError, PoleOnContour,
                         SingularityError, StencilError, TailDivergence)
from .report import Report

log = logging.getLogger(__name__)

_WRAPPER_WIDTH = 72
# Distance of random a-function points from the nearest Gamma pole.
POLE_MARGIN = 0.05
SUITES = ('specfun', 'relations', 'sov', 'gustafson', 'mb')
# Errors that make a case fail rather than the run.
DOMAIN_ERRORS = (ConstraintError, NonConvergence, PatternError, PlanError,
                 PoleError, PoleOnContour, SingularityError, StencilError,
                 TailDivergence)

# Metadata associated with the registered identities.
metadata = OrderedDict()

ANCHORS = {
    'a_function': 'a-function identities: a(a) a(1 - a_bar) = 1, '
                  'a(1 + a) = -a(a)/(a a_bar), a(a) a(1 - a) = (-1)^n, '
                  'a(a) = (-1)^n a(a_bar)',
    'eigen_a': sov.ANCHORS['eigen_a'],
    'eigen_b': sov.ANCHORS['eigen_b'],
}
ANCHORS.update(diagrams.ANCHORS)
ANCHORS.update(sov.ANCHORS)
ANCHORS.update(mellinbarnes.ANCHORS)
ANCHORS['txx_sweep'] = sov.ANCHORS['txx']


def _register(suite, tolerance):
    """Register an identity under a suite, with the key of its default
    tolerance in the configuration."""
    def wrapper(f):
        metadata[f.__name__] = {'doc': f.__doc__, 'suite': suite,
                                'tolerance': tolerance, 'run': f}
        return f
    return wrapper


def identities(suite='all'):
    if suite == 'all':
        return list(metadata)
    if suite not in SUITES:
        raise ConfigError('invalid suite `{}`: choose from {}'.format(
            suite, ', '.join(SUITES + ('all',))))
    return [name for name, data in metadata.items()
            if data['suite'] == suite]


def default_target(identity, config, case=None):
    """The configured tolerance of an identity; chains of two or more sites
    get the looser ``sov_n2``."""
    key = metadata[identity]['tolerance']
    if key == 'sov' and case is not None and (chain_length(case) or 1) > 1:
        key = 'sov_n2'
    return config.tolerances[key]


def print_identities():
    """Display the registered identities, grouped by suite."""
    wrapper = textwrap.TextWrapper(width=_WRAPPER_WIDTH, initial_indent='  ',
                                   subsequent_indent='  ')
    for suite in SUITES:
        print('[{}]'.format(suite))
        for name in identities(suite):
            doc = ' '.join(metadata[name]['doc'].split())
            print(name)
            print(wrapper.fill(doc))
        print()


# Parameter parsing
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def _complex(value):
    """A complex number from a number, a ``'0.3+0.1j'`` string or a
    ``[re, im]`` pair."""
    if isinstance(value, str):
        return complex(value.replace(' ', ''))
    if isinstance(value, (list, tuple)):
        re, im = value
        return complex(float(re), float(im))
    return complex(value)


def _bi_index(value):
    """A bi-index from a number, a ``'p/q'`` string, an ``[alpha, alpha_bar]``
    pair or an ``{alpha, alpha_bar}`` mapping."""
    return symalg.as_expr(value).evaluate({})


def _spin(value):
    if isinstance(value, dict):
        return specfun.Spin(**value)
    return specfun.Spin(*value)


def _separated(value):
    if isinstance(value, dict):
        return specfun.SeparatedPoint(value.get('n', 0),
                                      _complex(value.get('nu', 0)))
    n, nu = value
    return specfun.SeparatedPoint(n, _complex(nu))


def _field(params, key, convert, default=None, required=True):
    """``convert(params[key])``, raising ConfigError naming the field."""
    if key not in params:
        if required and default is None:
            raise ConfigError('invalid case: missing field `{}`'.format(key))
        return default
    try:
        return convert(params[key])
    except (AttributeError, KeyError, TypeError, ValueError) as e:
        raise ConfigError('invalid case: field `{}` = {!r}: {}'.format(
            key, params[key], e)) from e


def _list_of(convert):
    return lambda values: [convert(v) for v in values]


def _chain(params, config):
    return _field(params, 'chain', lambda d: sov.ChainConfig(
        d.get('N', 1), d.get('spin'),
        d.get('regularization', config.regularization)),
        default=sov.ChainConfig(1, regularization=config.regularization))


def _contour(params, target, config):
    if 'contour' in params:
        d = dict(params['contour'])
        d.setdefault('target_rel_error', target)
        d.setdefault('max_evaluations', config.budget)
        contour = _field({'contour': d}, 'contour',
                         mellinbarnes.ContourSpec.from_dict)
        if 'n_max' in params:
            contour = contour.with_n_max(int(params['n_max']))
        return contour
    return mellinbarnes.ContourSpec.over(
        ['u'], n_max=int(params.get('n_max', config.mb.n_max)),
        cutoff=float(params.get('nu_cutoff', config.mb.nu_cutoff)),
        target_rel_error=target, max_evaluations=config.budget)


def _elapsed(start):
    return int(1000 * (time.perf_counter() - start))


# Identities
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

@_register('specfun', 'specfun')
def a_function(case_id, params, target, config):
    """The four a-function identities (reflection, shift, complement and
    flip) at random pole-free bi-indices; the deviation is the worst
    residual."""
    start = time.perf_counter()
    rng = np.random.default_rng(_field(params, 'seed', int, default=0))
    count = _field(params, 'points', int, default=1000)
    worst, checked = dict.fromkeys(('reflection', 'shift', 'complement',
                                    'flip'), 0.0), 0
    while checked < count:
        n = int(rng.integers(-3, 4))
        alpha = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        idx = specfun.BiIndex(alpha, alpha - n, n=n)
        # Every Gamma argument the identities touch stays off the poles.
        args = [idx.alpha, 1 - idx.alpha_bar, idx.alpha_bar, 1 - idx.alpha,
                1 + idx.alpha, -idx.alpha_bar]
        if any(abs(z - round(z.real)) <= POLE_MARGIN for z in args):
            continue
        residuals = specfun.a_function_properties(idx)
        for key, value in residuals.items():
            worst[key] = max(worst[key], value)
        checked += 1
    deviation = max(worst.values())
    return Report(case_id, 'a_function', ANCHORS['a_function'], deviation,
                  0.0, deviation, 0.0, deviation <= target,
                  evaluations=checked, wall_ms=_elapsed(start),
                  config={'target': target}, details={'residuals': worst})


def _relation(which, case_id, params, target, config):
    params = dict(params)
    seed = _field(params, 'seed', int, default=0)
    params.pop('seed', None)
    return diagrams.verify_relation(which, params=params or None,
                                    target=target, case_id=case_id,
                                    seed=seed, budget=config.budget)


@_register('relations', 'relations')
def chain(case_id, params, target, config):
    """Chain relation: one vertex with two lines by plane quadrature against
    the closed form."""
    return _relation('chain', case_id, params, target, config)


@_register('relations', 'relations')
def star(case_id, params, target, config):
    """Star-triangle relation with the indices summing to 2."""
    return _relation('star', case_id, params, target, config)


@_register('relations', 'cross')
def cross(case_id, params, target, config):
    """Cross relation: two-vertex diagrams on both sides, by nested
    quadrature."""
    return _relation('cross', case_id, params, target, config)


@_register('relations', 'fourier')
def fourier(case_id, params, target, config):
    """Fourier transform of a propagator by Bessel-reduced radial
    integration."""
    return _relation('fourier', case_id, params, target, config)


def _eigen(which, case_id, params, target, config):
    start = time.perf_counter()
    cfg = _chain(params, config)
    x = _field(params, 'x', _list_of(_separated))
    z = _field(params, 'z', _list_of(_complex))
    us = _field(params, 'us', _list_of(_complex))
    p = _field(params, 'p', _complex, required=(which == 'B'))
    residuals = sov.eigen_residuals(
        cfg, which, x, z, us, p,
        rel_step=_field(params, 'rel_step', float, default=1e-3),
        budget=config.budget)
    worst = max(residuals)
    identity = 'eigen_' + which.lower()
    return Report(case_id, identity, ANCHORS[identity], worst, 0.0, worst,
                  0.0, worst <= target, wall_ms=_elapsed(start),
                  config={'target': target},
                  details={'chain': cfg, 'residuals': residuals})


@_register('sov', 'sov')
def eigen_a(case_id, params, target, config):
    """Eigen-equation of A_N(u) on Psi_A, with the derivatives of the
    monodromy entry taken by finite-difference stencils."""
    return _eigen('A', case_id, params, target, config)


@_register('sov', 'sov')
def eigen_b(case_id, params, target, config):
    """Eigen-equation of B_N(u) on Psi_B(p, x)."""
    return _eigen('B', case_id, params, target, config)


@_register('sov', 'sov')
def txx(case_id, params, target, config):
    """Matrix element of the shift operator between Psi_A states, at the
    configured regularization offset.

    With ``reference: zero`` the closed form is taken at zero offset, so the
    deviation includes the regularization bias.
    """
    start = time.perf_counter()
    cfg = _chain(params, config)
    x = _field(params, 'x', _list_of(_separated))
    xp = _field(params, 'xp', _list_of(_separated))
    z0 = _field(params, 'z0', _complex)
    reference = params.get('reference', 'offset')
    if reference not in ('offset', 'zero'):
        raise ConfigError('invalid case: field `reference` must be `offset` '
                          'or `zero`, got {!r}'.format(reference))
    element = sov.matrix_element_T(cfg, x, xp, z0, target / 20, config.budget)
    if reference == 'zero':
        element = element.against(sov.shift_element_closed(cfg, x, xp, z0))
    return element.report(case_id, 'txx', target, wall_ms=_elapsed(start),
                          details={'chain': cfg})


@_register('sov', 'sov')
def txx_sweep(case_id, params, target, config):
    """The shift matrix element at halving offsets, Richardson-extrapolated
    to zero offset."""
    report = sov.regularization_sweep(
        _chain(params, config), _field(params, 'x', _list_of(_separated)),
        _field(params, 'xp', _list_of(_separated)),
        _field(params, 'z0', _complex),
        offsets=_field(params, 'offsets', lambda v: tuple(map(float, v)),
                       default=REGULARIZATION_SWEEP),
        target=target, case_id=case_id, budget=config.budget)
    return report._replace(identity='txx_sweep')


@_register('sov', 'sov')
def ba(case_id, params, target, config):
    """Scalar product of a B-system state with an A-system state."""
    start = time.perf_counter()
    cfg = _chain(params, config)
    element = sov.matrix_element_BA(
        cfg, _field(params, 'p', _complex),
        _field(params, 'u', _list_of(_separated), default=[],
               required=False),
        _field(params, 'x', _list_of(_separated)), target / 20,
        config.budget)
    return element.report(case_id, 'ba', target, wall_ms=_elapsed(start))


@_register('sov', 'sov')
def unitarity(case_id, params, target, config):
    """Invariance of the inner product under the group action, on two
    Gaussians."""
    centers = _field(params, 'centers', _list_of(_complex),
                     default=[0.2 + 0.1j, -0.3 + 0.4j])
    g = _field(params, 'g', lambda rows: [[_complex(v) for v in row]
                                          for row in rows])
    spin = _field(params, 'spin', _spin, default=specfun.Spin(0, 0.1))

    def phi(z):
        return np.exp(-np.abs(z - centers[0]) ** 2)

    def psi(z):
        return (z - centers[1]) * np.exp(-np.abs(z - centers[1]) ** 2 / 2)

    return sov.check_unitarity(g, phi, psi, spin, target, case_id,
                               config.budget)


@_register('sov', 'completeness')
def orthogonality(case_id, params, target, config):
    """Smeared orthogonality of Psi_A at N = 1."""
    start = time.perf_counter()
    element = sov.smeared_orthogonality(
        _chain(params, config), _field(params, 'x', _separated),
        _field(params, 'xp', _separated),
        _field(params, 'width', float, default=1.0), target / 10,
        config.budget)
    return element.report(case_id, 'orthogonality', target,
                          wall_ms=_elapsed(start))


@_register('sov', 'completeness')
def completeness_b(case_id, params, target, config):
    """Completeness of the B-system at N = 1 against a Gaussian-smeared
    delta function."""
    start = time.perf_counter()
    element = sov.completeness_B(
        _field(params, 'z', _complex), _field(params, 'w', _complex),
        _field(params, 'sigma', float, default=1.0), target / 10,
        config.budget)
    return element.report(case_id, 'completeness_b', target,
                          wall_ms=_elapsed(start))


@_register('gustafson', 'gustafson')
def gustafson(case_id, params, target, config):
    """Complex Gustafson integral: the sum-integral over N - 1 separated
    variables against its closed product."""
    x = _field(params, 'x', _list_of(_separated))
    return mellinbarnes.verify_gustafson(
        _field(params, 'N', int, default=len(x)), x,
        _field(params, 'xp', _list_of(_separated)),
        contour=_contour(params, target, config), target=target,
        case_id=case_id)


@_register('mb', 'mb')
def mb_star(case_id, params, target, config):
    """Mellin-Barnes star-triangle relation: one sum-integral against a
    closed product of a-factors."""
    return mellinbarnes.verify_mb_star_triangle(
        _field(params, 'betas', _list_of(_bi_index)),
        _field(params, 'lambdas', _list_of(_separated)),
        contour=_contour(params, target, config), target=target,
        case_id=case_id)


@_register('mb', 'mb')
def mb_star_coherence(case_id, params, target, config):
    """Star-triangle relation by quadrature in position space and by the
    Mellin-Barnes sum-integral at the same betas; the two ratios must agree
    within the summed error estimates."""
    return mellinbarnes.verify_star_coherence(
        _field(params, 'betas', _list_of(_bi_index)),
        _field(params, 'lambdas', _list_of(_separated)),
        contour=_contour(params, target, config), target=target,
        case_id=case_id, budget=config.budget)


@_register('mb', 'mb')
def mb_propagator(case_id, params, target, config):
    """Mellin-Barnes representation of a propagator."""
    return mellinbarnes.verify_mb_propagator(
        _field(params, 'beta', _bi_index), _field(params, 'z', _complex),
        _field(params, 'w', _complex),
        contour=_contour(params, target, config), target=target,
        case_id=case_id)


@_register('mb', 'completeness')
def mellin_orthogonality(case_id, params, target, config):
    """Smeared orthogonality of the Mellin characters; the deviation is
    relative to the peak of the window."""
    return mellinbarnes.verify_completeness_resolution(
        _field(params, 'x', _separated), _field(params, 'xp', _separated),
        width=_field(params, 'width', float, default=1.0), target=target,
        case_id=case_id, budget=config.budget)


@_register('mb', 'mb')
def mellin_pair(case_id, params, target, config):
    """Mellin transform and inverse on a Gaussian times a power of z."""
    kwargs = {}
    if 'nodes' in params:
        kwargs['nodes'] = _field(params, 'nodes', _list_of(tuple))
    if 'z' in params:
        kwargs['z'] = _field(params, 'z', _complex)
    return mellinbarnes.check_mellin_pair(
        k=_field(params, 'k', int, default=1), target=target,
        case_id=case_id, budget=config.budget, **kwargs)


# Running cases
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

def run_case(case, config, target=None):
    """Run one case.

    A domain error (a pole on the contour, a divergent tail, a broken
    constraint, ...) gives a failing report that names it.

    Raises:
        ConfigError: If the case itself is malformed.
    """
    identity = case['identity']
    if identity not in metadata:
        raise ConfigError('invalid case `{}`: unknown identity `{}`'.format(
            case['id'], identity))
    target = (target or case.get('target')
              or default_target(identity, config, case))
    run = metadata[identity]['run']
    try:
        report = run(case['id'], case.get('params') or {}, target, config)
    except ConfigError as e:
        raise ConfigError('case `{}`: {}'.format(case['id'], e)) from e
    except DOMAIN_ERRORS as e:
        log.warning('%s: %s: %s', case['id'], type(e).__name__, e)
        estimate = getattr(getattr(e, 'estimate', None), 'value', None)
        report = Report.failure(case['id'], identity, ANCHORS[identity], e,
                                target, estimate=estimate)
    except ValueError as e:
        raise ConfigError('case `{}`: invalid parameters: {}'.format(
            case['id'], e)) from e
    log.info('%s: %s (rel_dev %.2e)', report.case_id,
             'pass' if report.passed else 'FAIL', report.rel_dev)
    return report


def run_cases(cases, config, target=None, workers=None, progress=True):
    """Run cases on a bounded thread pool.

    Returns:
        list(Report): In the order of ``cases``.
    """
    workers = workers or config.workers
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(run_case, case, config, target)
                   for case in cases]
        return [future.result()
                for future in tqdm(futures, disable=not progress,
                                   leave=False, dynamic_ncols=True)]


def chain_length(case):
    """The number of sites a case is about, or ``None``."""
    params = case.get('params') or {}
    if isinstance(params.get('chain'), dict):
        return params['chain'].get('N', 1)
    if 'N' in params:
        return params['N']
    if isinstance(params.get('x'), list):
        return len(params['x'])
    return None


def select(cases, N=None, which=None):
    """Keep the cases with ``N`` sites and, when given, of identity
    ``which``."""
    if which is not None and which not in metadata:
        raise ConfigError('unknown identity `{}`'.format(which))
    return [case for case in cases
            if (N is None or chain_length(case) == N)
            and (which is None or case['identity'] == which)]


def _with_value(case, parameter, value):
    """A copy of ``case`` with one parameter replaced."""
    case = dict(case, params=dict(case.get('params') or {}))
    params = case['params']
    if parameter == 'target':
        case['target'] = value
    elif parameter == 'regularization':
        params['chain'] = dict(params.get('chain') or {},
                               regularization=value)
    else:
        params[parameter] = value
    case['id'] = '{}@{}={}'.format(case['id'], parameter, value)
    return case


def sweep(identity, grid, config, base=None, workers=None, progress=True):
    """Run one identity over the values of a grid parameter.

    Args:
        identity (str): A registered identity.
        grid (dict): ``parameter``, ``values`` and an optional ``case`` with
            the parameters held fixed.

    Keyword Args:
        base (dict): Case to start from when the grid has none.

    Returns:
        list(tuple(value, Report)): In the order of the values.
    """
    if identity not in metadata:
        raise ConfigError('unknown identity `{}`'.format(identity))
    if 'case' in grid:
        base = {'id': identity, 'identity': identity,
                'params': grid['case']}
    elif base is None:
        raise ConfigError('sweep of `{}`: the grid has no `case` and no '
                          'shipped case exists'.format(identity))
    cases = [_with_value(base, grid['parameter'], value)
             for value in grid['values']]
    reports = run_cases(cases, config, workers=workers, progress=progress)
    return list(zip(grid['values'], reports))
