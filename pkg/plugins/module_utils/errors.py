#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type


class RailschedException(Exception):

    def __init__(self, code, message):
        super(RailschedException, self).__init__(f'{code}: {message}')
        self.code = code
        self.message = message

    def to_json(self):
        return dict(
            code=self.code,
            message=self.message
        )


class ConfigurationException(RailschedException):
    pass


class ParameterException(RailschedException):
    pass


class CapacityException(RailschedException):
    pass


class InfeasibleException(RailschedException):

    def __init__(self, code, message, violations=None):
        super(InfeasibleException, self).__init__(code, message)
        self.violations = violations or list()

    def to_json(self):
        result = super(InfeasibleException, self).to_json()
        result['violations'] = [violation.to_json() for violation in self.violations]
        return result


class DecompositionException(RailschedException):
    pass


class ParseException(RailschedException):

    def __init__(self, message, filename=None, line=None):
        location = filename or '<input>'
        if line is not None:
            location = f'{location}:{line}'
        super(ParseException, self).__init__('ParseError', f'{location}: {message}')
        self.filename = filename
        self.line = line
