#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# __main__.py

"""
pysl2c
~~~~~~
Verify the separation-of-variables identities of the SL(2,C) spin magnet.

Usage:
    pysl2c verify <suite> [options]
    pysl2c sweep <identity> --grid=FILE --out=CSV [options]
    pysl2c list
    pysl2c -h | --help
    pysl2c -v | --version

Arguments:
    verify <suite>       Run a suite: specfun, relations, sov, gustafson, mb
                         or all
    sweep <identity>     Run one identity over the values of a grid file and
                         write the deviations as CSV
    list                 List the suites and their identities

Exit status is 0 when every case passes, 1 when a case fails and 2 on an
invalid configuration, case file or grid.

General options:
    -h --help            Show this
    -v --version         Show version
    -c --config=PATH     Configuration file (defaults to `pysl2c_config.yml`)
    -w --workers=N       Number of cases run concurrently
    -b --budget=N        Evaluation budget of each quadrature
    -q --quiet           Do not show progress bars

Verification options:
    -C --case=FILE       Run the cases of this file instead of the shipped ones
    -t --target=X        Relative deviation that passes, for every case
    -r --report=PATH     Write the JSON-lines report here
    -T --no-timestamps   Leave timestamps and wall times out of the report
    -N --N=INT           Only cases with this many sites
    -W --which=NAME      Only cases of this identity

Sweep options:
    -g --grid=FILE       YAML file with `parameter`, `values` and optionally
                         the fixed `case` parameters
    -o --out=CSV         Output CSV file
"""

import sys
import time

from docopt import docopt

from . import data, suites
from .__about__ import __version__
from .config import configure_logging, load_config
from .constants import EXIT_CONFIG, EXIT_FAILED, EXIT_OK
from .exceptions import ConfigError
from .report import summary_table
from .utils import compress


def _positive(kind):
    def convert(value):
        try:
            value = kind(value)
        except ValueError:
            value = None
        if value is None or not value > 0:
            raise ConfigError('invalid option: expected a positive {}'.format(
                kind.__name__))
        return value
    return convert


# Map CLI options to configuration keys and data types.
cli_opt_to_config = {
    '--budget':  ('budget', _positive(int)),
    '--workers': ('workers', _positive(int)),
}


def process_cli_opts(args, mapping):
    return {param[0]: param[1](args[opt])
            for opt, param in mapping.items()
            if args[opt] is not None}


def _print_failures(reports):
    for r in reports:
        if not r.passed:
            reason = r.details.get('error') or (
                'rel_dev {:.3e} above target {:.1e}'.format(
                    r.rel_dev, r.config.get('target', float('nan'))))
            print('FAIL {} ({}): {}'.format(r.case_id, r.identity, reason),
                  file=sys.stderr)


def verify(args, config):
    suite = args['<suite>']
    names = set(suites.identities(suite))
    if args['--case']:
        cases = [case for case in data.load_case_file(args['--case'])
                 if case['identity'] in names]
    else:
        cases = data.load_suite(suite)
    N = _positive(int)(args['--N']) if args['--N'] is not None else None
    cases = suites.select(cases, N=N, which=args['--which'])
    if not cases:
        raise ConfigError('no cases of suite `{}` match the given '
                          'options'.format(suite))
    target = (_positive(float)(args['--target'])
              if args['--target'] is not None else None)
    start = time.perf_counter()
    reports = suites.run_cases(cases, config, target=target,
                               progress=not args['--quiet'])
    elapsed = time.perf_counter() - start
    if args['--report']:
        data.write_reports(reports, args['--report'],
                           timestamps=not args['--no-timestamps'])
    print(summary_table(reports))
    print('Verified {} cases in {}.'.format(len(reports), compress(elapsed)))
    _print_failures(reports)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def sweep(args, config):
    identity = args['<identity>']
    grid = data.load_grid(args['--grid'])
    base = None if 'case' in grid else data.shipped_case(identity)
    rows = suites.sweep(identity, grid, config, base=base,
                        progress=not args['--quiet'])
    data.write_csv(rows, args['--out'], grid['parameter'])
    reports = [r for _, r in rows]
    print(summary_table(reports))
    # Deviations above target are data here; only points that could not be
    # evaluated fail the sweep.
    broken = [r for r in reports if 'error' in r.details]
    _print_failures(broken)
    return EXIT_FAILED if broken else EXIT_OK


def main(args):
    # Print the registered identities and their descriptions.
    if args['list']:
        suites.print_identities()
        return EXIT_OK
    try:
        config = load_config(args['--config'],
                             process_cli_opts(args, cli_opt_to_config))
        configure_logging(config)
        if args['verify']:
            return verify(args, config)
        return sweep(args, config)
    except ConfigError as e:
        print('error: {}'.format(e), file=sys.stderr)
        return EXIT_CONFIG


def run(argv=None):
    """Console entry point."""
    args = docopt(__doc__, argv=argv, version=__version__)
    sys.exit(main(args))


if __name__ == '__main__':
    # Get command-line args from docopt.
    sys.argv[0] = 'pysl2c'
    run()
