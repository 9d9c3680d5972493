#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import os

from ansible.module_utils.basic import AnsibleModule, missing_required_lib

from .file_utils import digest, digest_text, write_if_changed
from .log_utils import JsonLogger

NUMPY_IMPORT_ERR = None
try:
    import numpy  # noqa: F401
    HAS_NUMPY = True
except ImportError as e:
    HAS_NUMPY = False
    NUMPY_IMPORT_ERR = str(e)

SEMANTIC_VERSION_IMPORT_ERR = None
try:
    import semantic_version  # noqa: F401
    HAS_SEMANTIC_VERSION = True
except ImportError as e:
    HAS_SEMANTIC_VERSION = False
    SEMANTIC_VERSION_IMPORT_ERR = str(e)

REQUIREMENTS_URL = 'https://github.com/railsched/rescheduling/blob/main/docs/source/installation.rst#requirements'


class RailschedModule(AnsibleModule):

    def __init__(self, *args, **kwargs):
        super(RailschedModule, self).__init__(*args, **kwargs)
        self.check_for_missing_libs()
        self.log = JsonLogger(self._name)

    def check_for_missing_libs(self):
        if not HAS_NUMPY:
            self.fail_json(msg=missing_required_lib('numpy', url=REQUIREMENTS_URL), exception=NUMPY_IMPORT_ERR)
        if not HAS_SEMANTIC_VERSION:
            self.fail_json(msg=missing_required_lib('semantic_version', url=REQUIREMENTS_URL), exception=SEMANTIC_VERSION_IMPORT_ERR)

    def json_log(self, msg):
        self.log.json_log(msg, depth=2)

    def write_document(self, path, text):
        """
        Write a document unless the file already holds it; in check mode
        only report whether it would change.
        """
        if self.check_mode:
            return not os.path.isfile(path) or digest(path) != digest_text(text)
        return write_if_changed(path, text)

    def remove_document(self, path):
        if not os.path.isfile(path):
            return False
        if not self.check_mode:
            os.remove(path)
        return True
