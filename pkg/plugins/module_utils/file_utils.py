#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import hashlib
import os


def digest(path):
    with open(path, 'rb') as file:
        return hashlib.sha256(file.read()).hexdigest()


def digest_text(text):
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def read_text(path):
    with open(path, 'r') as file:
        return file.read()


def write_if_changed(path, text):
    """
    Write text to path unless the file already holds it; returns changed.
    """
    if os.path.isfile(path) and digest(path) == digest_text(text):
        return False
    with open(path, 'w') as file:
        file.write(text)
    return True
