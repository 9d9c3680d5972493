#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from ..module_utils.document_utils import write_instance
from ..module_utils.module import RailschedModule
from ..module_utils.network_model import compute_time_windows, validate_instance
from ..module_utils.utils import SEED_ENV, get_instance_by_params

from ansible.module_utils.basic import env_fallback
from ansible.module_utils._text import to_native

import os

ANSIBLE_METADATA = {'metadata_version': '1.1',
                    'status': ['preview'],
                    'supported_by': 'community'}

DOCUMENTATION = '''
---
module: rail_instance
short_description: Manage a railway rescheduling instance document
description:
    - Create, update, or delete an instance document describing a line, its trains and their timetables.
    - The instance is either the two-train reference instance or a seeded member of the single-track family.
author: railsched contributors
options:
    state:
        description:
            - C(absent) - The instance document at I(path) will be removed if it exists.
            - C(present) - The instance document at I(path) will be written, or rewritten if its content would change.
        type: str
        default: present
        choices:
            - absent
            - present
    path:
        description:
            - The path of the instance document.
        type: str
        required: true
    appendix:
        description:
            - Build the two-train reference instance on the Baltimore line.
            - When C(false), I(trains) and I(d_max) describe a family instance instead.
        type: bool
        default: false
    initial_delay:
        description:
            - The initial delay of train 1 in the reference instance, in minutes.
        type: int
        default: 5
    trains:
        description:
            - The number of trains of a family instance.
        type: int
    d_max:
        description:
            - The maximal secondary delay, in minutes.
            - Defaults to 2 for the reference instance.
        type: int
    disturbed:
        description:
            - Inject seeded initial delays into a family instance.
        type: bool
        default: false
    seed:
        description:
            - The seed for the family instance.
            - If not given, the value of the C(RAILSCHED_SEED) environment variable is used, else 0.
        type: int
    disturbance_support:
        description:
            - The extra delays that may occur in the stochastic zone.
        type: list
        elements: int
    disturbance_weights:
        description:
            - The probability of each value in I(disturbance_support).
            - If not given, the extra delays are uniformly distributed.
        type: list
        elements: float
notes: []
requirements: []
'''

EXAMPLES = '''
- name: Create the reference instance
  railsched.rescheduling.rail_instance:
    state: present
    path: appendix.json
    appendix: true

- name: Create a disturbed family instance with six trains
  railsched.rescheduling.rail_instance:
    state: present
    path: family-6.json
    trains: 6
    d_max: 4
    disturbed: true
    seed: 7

- name: Remove the instance
  railsched.rescheduling.rail_instance:
    state: absent
    path: appendix.json
'''

RETURN = '''
---
instance:
    description:
        - The instance.
    returned: when I(state) is C(present)
    type: dict
    contains:
        trains:
            description:
                - The trains, each with its route, planned times and initial delay.
            type: list
            elements: dict
        d_max:
            description:
                - The maximal secondary delay, in minutes.
            type: int
            sample: 2
        params:
            description:
                - The minimal running, dwell, headway and turnaround times.
            type: dict
windows:
    description:
        - The size of the time window of every train at every station.
    returned: when I(state) is C(present)
    type: list
    elements: dict
violations:
    description:
        - Any consistency problems found in the instance.
    returned: when I(state) is C(present)
    type: list
    elements: dict
'''


def main():

    # Create the module.
    argument_spec = dict(
        state=dict(type='str', default='present', choices=['present', 'absent']),
        path=dict(type='str', required=True),
        appendix=dict(type='bool', default=False),
        initial_delay=dict(type='int', default=5),
        trains=dict(type='int'),
        d_max=dict(type='int'),
        disturbed=dict(type='bool', default=False),
        seed=dict(type='int', fallback=(env_fallback, [SEED_ENV])),
        disturbance_support=dict(type='list', elements='int'),
        disturbance_weights=dict(type='list', elements='float')
    )
    module = RailschedModule(argument_spec=argument_spec, supports_check_mode=True)

    # Ensure all exceptions are caught.
    try:

        # If the instance should not exist, handle that now.
        path = module.params['path']
        state = module.params['state']
        if state == 'absent':
            changed = module.remove_document(path)
            return module.exit_json(changed=changed)

        # Build the instance.
        instance = get_instance_by_params(module.params)
        module.json_log({'msg': 'built instance', 'path': path, 'trains': len(instance.trains), 'exists': os.path.isfile(path)})

        # Check the instance and compute its windows before writing it.
        violations = validate_instance(instance)
        windows = compute_time_windows(instance)
        window_sizes = [
            dict(train=train, station=station, size=windows.size(station, train))
            for station, train in instance.keys()
        ]

        # Write the instance document.
        changed = module.write_document(path, write_instance(instance))
        module.exit_json(
            changed=changed,
            instance=instance.to_json(),
            windows=window_sizes,
            violations=[violation.to_json() for violation in violations]
        )

    # Notify Ansible of the exception.
    except Exception as e:
        module.fail_json(msg=to_native(e))


if __name__ == '__main__':
    main()
