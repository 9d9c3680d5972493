#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from ..module_utils.document_utils import qubo_comments, write_catalog, write_ising, write_qubo
from ..module_utils.ising_engine import to_ising
from ..module_utils.module import RailschedModule
from ..module_utils.network_model import compute_time_windows
from ..module_utils.qubo_engine import assemble
from ..module_utils.utils import catalog_path, get_instance_by_module, get_penalties_by_params

from ansible.module_utils._text import to_native

ANSIBLE_METADATA = {'metadata_version': '1.1',
                    'status': ['preview'],
                    'supported_by': 'community'}

DOCUMENTATION = '''
---
module: qubo_model
short_description: Manage the QUBO compiled from a railway rescheduling instance
description:
    - Compile an instance into a QUBO over one-hot time variables and write it, with its variable catalog, to a file.
    - Optionally also write the equivalent Ising model.
author: railsched contributors
options:
    state:
        description:
            - C(absent) - The QUBO file, its catalog and the Ising file will be removed if they exist.
            - C(present) - The QUBO file and its catalog will be written, or rewritten if their content would change.
        type: str
        default: present
        choices:
            - absent
            - present
    path:
        description:
            - The path of the QUBO file.
            - The variable catalog is written next to it, to I(path) with C(.catalog) appended.
        type: str
        required: true
    instance:
        description:
            - The instance to compile.
            - You can pass a string, which is the path to an instance document written by the M(rail_instance) module.
            - You can also pass a dict, which must match the result format of the M(rail_instance) module.
        type: raw
    penalties:
        description:
            - C(split) - Penalties are chosen so that every feasible state lies below every infeasible state.
            - C(overlapping) - Small penalties; feasible and infeasible energies may overlap.
            - C(custom) - Use I(p_sum) and I(p_pair).
        type: str
        default: split
        choices:
            - overlapping
            - split
            - custom
    p_sum:
        description:
            - The one-hot penalty when I(penalties) is C(custom).
        type: float
    p_pair:
        description:
            - The pair penalty when I(penalties) is C(custom).
        type: float
    penalty_overrides:
        description:
            - Pair penalties for individual constraint families, keyed by C(passing), C(headway) or C(rollingstock).
        type: dict
    ising_path:
        description:
            - If given, also write the Ising model to this path.
        type: str
notes: []
requirements: []
'''

EXAMPLES = '''
- name: Compile the reference instance with split penalties
  railsched.rescheduling.qubo_model:
    state: present
    path: appendix.qubo
    instance: appendix.json
    penalties: split
    ising_path: appendix.ising

- name: Compile with a heavier headway penalty
  railsched.rescheduling.qubo_model:
    state: present
    path: appendix-custom.qubo
    instance: appendix.json
    penalties: custom
    p_sum: 2.5
    p_pair: 1.25
    penalty_overrides:
      headway: 5.0

- name: Remove the QUBO
  railsched.rescheduling.qubo_model:
    state: absent
    path: appendix.qubo
'''

RETURN = '''
---
qubo:
    description:
        - A summary of the compiled QUBO.
    returned: when I(state) is C(present)
    type: dict
    contains:
        nvars:
            description:
                - The number of binary variables.
            type: int
            sample: 18
        offset:
            description:
                - The constant energy offset.
            type: float
        constraint_elements:
            description:
                - The number of QUBO matrix elements set by constraint penalties.
            type: int
            sample: 90
        elements_by_family:
            description:
                - The number of QUBO matrix elements contributed by each constraint family.
            type: dict
        penalties:
            description:
                - The penalties used.
            type: dict
ising:
    description:
        - The number of spins, fields and couplings of the Ising model.
    returned: when I(ising_path) is given
    type: dict
'''


def main():

    # Create the module.
    argument_spec = dict(
        state=dict(type='str', default='present', choices=['present', 'absent']),
        path=dict(type='str', required=True),
        instance=dict(type='raw'),
        penalties=dict(type='str', default='split', choices=['overlapping', 'split', 'custom']),
        p_sum=dict(type='float'),
        p_pair=dict(type='float'),
        penalty_overrides=dict(type='dict'),
        ising_path=dict(type='str')
    )
    required_if = [
        ('state', 'present', ['instance']),
        ('penalties', 'custom', ['p_sum', 'p_pair'])
    ]
    module = RailschedModule(argument_spec=argument_spec, supports_check_mode=True, required_if=required_if)

    # Ensure all exceptions are caught.
    try:

        # If the QUBO should not exist, handle that now.
        path = module.params['path']
        ising_path = module.params['ising_path']
        state = module.params['state']
        if state == 'absent':
            changed = module.remove_document(path)
            changed = module.remove_document(catalog_path(path)) or changed
            if ising_path:
                changed = module.remove_document(ising_path) or changed
            return module.exit_json(changed=changed)

        # Compile the instance.
        instance = get_instance_by_module(module)
        penalties = get_penalties_by_params(module.params)
        qubo = assemble(instance, compute_time_windows(instance), penalties)
        module.json_log({'msg': 'compiled qubo', 'path': path, 'summary': qubo.summary()})

        # Write the QUBO and its catalog.
        changed = module.write_document(path, write_qubo(qubo, qubo_comments(qubo, penalties)))
        changed = module.write_document(catalog_path(path), write_catalog(qubo.catalog)) or changed
        result = dict(qubo=dict(qubo.summary(), penalties=penalties.to_json()))

        # Write the Ising model, if requested.
        if ising_path:
            ising = to_ising(qubo)
            changed = module.write_document(ising_path, write_ising(ising)) or changed
            result['ising'] = dict(nspins=ising.n, fields=len(ising.nonzero_fields()), couplings=len(ising.nonzero_couplings()))
        module.exit_json(changed=changed, **result)

    # Notify Ansible of the exception.
    except Exception as e:
        module.fail_json(msg=to_native(e))


if __name__ == '__main__':
    main()
