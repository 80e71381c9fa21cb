#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from setuptools import setup

about = {}
with open('pysl2c/__about__.py') as f:
    exec(f.read(), about)

install_requires = [
    'docopt',
    'jsonschema',
    'munch',
    'networkx',
    'numpy',
    'pyyaml',
    'scipy',
    'tqdm',
]

setup(
    name='pysl2c',
    version=about['__version__'],
    packages=['pysl2c'],
    package_data={'pysl2c': ['cases/*.yml', 'grids/*.yml',
                             'report_schema.json']},
    install_requires=install_requires,
    tests_require=['pytest', 'mpmath'],
    entry_points={'console_scripts': ['pysl2c = pysl2c.__main__:run']},
)
