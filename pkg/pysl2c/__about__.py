#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# __about__.py

__version__ = '0.1.0'
