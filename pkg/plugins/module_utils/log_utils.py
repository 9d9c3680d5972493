#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import json
import logging
import os
from inspect import getframeinfo, stack

LOG_FILENAME_ENV = 'RAILSCHED_LOG_FILENAME'
LOG_FILENAME_PATH = '/tmp/railsched-log-filename.txt'


def get_log_filename():
    filename = os.environ.get(LOG_FILENAME_ENV, None)
    if not filename:
        if os.path.isfile(LOG_FILENAME_PATH):
            with open(LOG_FILENAME_PATH, 'r') as file:
                filename = file.readline().strip()
    return filename or None


class JsonLogger:
    """
    Debug logger writing one indented JSON document per call.

    Nothing is configured until the first call, and nothing is written unless
    a log file has been named through the environment or the well known file.
    """

    def __init__(self, name):
        self.name = name
        self.logger = None
        self.configured = False

    def setup_logging(self):
        self.configured = True
        filename = get_log_filename()
        if not filename:
            return
        logging.basicConfig(filename=filename, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.DEBUG)
        self.logger = logging.getLogger(self.name)

    def json_log(self, msg, depth=1):
        if not self.configured:
            self.setup_logging()
        if not self.logger:
            return
        caller = getframeinfo(stack()[depth][0])
        caller_str = f'{caller.filename}:{caller.lineno}'
        msg['caller'] = caller_str
        msg_str = json.dumps(msg, indent=4, default=str)
        self.logger.debug(msg_str)


def get_logger(name):
    return JsonLogger(name)
