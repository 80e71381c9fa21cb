#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# config.py

"""
Run configuration.

Settings live in a YAML file (``pysl2c_config.yml`` at the repository root by
default) and are exposed as a ``Munch``, so they can be reached with dot
notation::

    >>> config = load_config(overrides={'workers': 2})
    >>> config.workers
    2
    >>> config.tolerances.gustafson
    0.0001

The evaluation budget can also be set with the ``PYSL2C_BUDGET`` environment
variable, which wins over the file but not over explicit overrides.
"""

import logging
import logging.config
import os
from copy import deepcopy

import yaml
from munch import Munch, munchify

from . import constants, validate
from .exceptions import ConfigError

log = logging.getLogger(__name__)

DEFAULTS = {
    'budget': 2000000,
    'workers': 1,
    'regularization': constants.DEFAULT_REGULARIZATION,
    'tolerances': {
        'specfun': 1e-11,
        'relations': 1e-6,
        'cross': 1e-5,
        'fourier': 1e-7,
        'sov': 1e-5,
        'sov_n2': 1e-3,
        'gustafson': 1e-4,
        'mb': 1e-4,
        'completeness': 1e-3,
    },
    'mb': {
        'n_max': 32,
        'nu_cutoff': 40.0,
    },
    'logging': {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'standard': {
                'format': ('%(asctime)s [%(name)s.%(funcName)s] '
                           '%(levelname)s: %(message)s'),
            },
        },
        'handlers': {
            'console': {
                'class': 'logging.StreamHandler',
                'formatter': 'standard',
                'level': 'WARNING',
            },
        },
        'loggers': {
            'pysl2c': {
                'handlers': ['console'],
                'level': 'INFO',
                'propagate': False,
            },
        },
    },
}


def _merge(base, update):
    """Recursively merge ``update`` into a copy of ``base``."""
    merged = deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(filepath=None, overrides=None):
    """Load the configuration.

    Keyword Args:
        filepath (str): A YAML (or JSON) file. Defaults to the repository
            config file if it exists, else the built-in defaults.
        overrides (dict): Values that win over the file and the environment.

    Returns:
        Munch: The validated configuration.

    Raises:
        ConfigError: If the file cannot be parsed or a value is invalid.
    """
    config = deepcopy(DEFAULTS)
    if filepath is None and os.path.exists(constants.DEFAULT_CONFIG_PATH):
        filepath = constants.DEFAULT_CONFIG_PATH
    if filepath is not None:
        try:
            with open(filepath) as f:
                loaded = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(
                'invalid config file `{}`: {}'.format(filepath, e)) from e
        if not isinstance(loaded, dict):
            raise ConfigError(
                'invalid config file `{}`: expected a mapping'.format(
                    filepath))
        config = _merge(config, loaded)
    budget = os.environ.get(constants.BUDGET_ENV_VAR)
    if budget is not None:
        try:
            config['budget'] = int(budget)
        except ValueError:
            raise ConfigError('invalid {}: `{}` is not an integer'.format(
                constants.BUDGET_ENV_VAR, budget))
    if overrides:
        config = _merge(config, overrides)
    validate.config(config)
    return munchify(config)


def configure_logging(config):
    """Apply the ``logging`` section of a configuration."""
    section = config.get('logging') if config else None
    if section:
        logging.config.dictConfig(Munch.toDict(section)
                                  if isinstance(section, Munch) else section)
    log.debug('logging configured')
