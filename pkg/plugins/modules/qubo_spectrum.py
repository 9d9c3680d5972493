#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from ..module_utils.analysis import spectrum_summary
from ..module_utils.document_utils import write_document
from ..module_utils.module import RailschedModule
from ..module_utils.network_model import compute_time_windows
from ..module_utils.qubo_engine import assemble
from ..module_utils.samplers import enumerate_spectrum
from ..module_utils.utils import get_instance_by_module, get_penalties_by_params

from ansible.module_utils._text import to_native

ANSIBLE_METADATA = {'metadata_version': '1.1',
                    'status': ['preview'],
                    'supported_by': 'community'}

DOCUMENTATION = '''
---
module: qubo_spectrum
short_description: Get the energy spectrum of the QUBO compiled from an instance
description:
    - Compile an instance, enumerate every state of its QUBO and split the energies into feasible and infeasible states.
    - Reports the gap between the highest feasible and the lowest infeasible energy, and so whether the penalties
      are split or overlapping.
    - Enumeration is limited to QUBOs with at most 24 variables.
author: railsched contributors
options:
    instance:
        description:
            - The instance to compile.
            - You can pass a string, which is the path to an instance document written by the M(rail_instance) module.
            - You can also pass a dict, which must match the result format of the M(rail_instance) module.
        type: raw
        required: true
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
    bins:
        description:
            - The number of bins of the energy histogram.
        type: int
        default: 50
    path:
        description:
            - If given, write the spectrum document to this path.
        type: str
notes: []
requirements: []
'''

EXAMPLES = '''
- name: Compare the spectra of both penalty regimes
  railsched.rescheduling.qubo_spectrum:
    instance: appendix.json
    penalties: "{{ item }}"
    path: "appendix-{{ item }}-spectrum.json"
  loop:
    - split
    - overlapping
'''

RETURN = '''
---
spectrum:
    description:
        - The spectrum summary.
    type: dict
    contains:
        states:
            description:
                - The number of enumerated states.
            type: int
            sample: 262144
        min_feasible:
            description:
                - The lowest feasible energy, which is the optimal objective.
            type: float
            sample: 6.0
        max_feasible:
            description:
                - The highest feasible energy.
            type: float
        min_infeasible:
            description:
                - The lowest infeasible energy.
            type: float
        gap:
            description:
                - I(min_infeasible) minus I(max_feasible).
            type: float
        regime:
            description:
                - C(Split) if the gap is positive, C(Overlapping) otherwise.
            type: str
            sample: Split
        feasible_energies:
            description:
                - Every feasible energy level with the number of states at that level.
            type: list
            elements: dict
        histogram:
            description:
                - Feasible and infeasible state counts over a shared energy binning.
            type: list
            elements: dict
'''


def main():

    # Create the module.
    argument_spec = dict(
        instance=dict(type='raw', required=True),
        penalties=dict(type='str', default='split', choices=['overlapping', 'split', 'custom']),
        p_sum=dict(type='float'),
        p_pair=dict(type='float'),
        penalty_overrides=dict(type='dict'),
        bins=dict(type='int', default=50),
        path=dict(type='str')
    )
    required_if = [
        ('penalties', 'custom', ['p_sum', 'p_pair'])
    ]
    module = RailschedModule(argument_spec=argument_spec, supports_check_mode=True, required_if=required_if)

    # Ensure all exceptions are caught.
    try:

        # Compile the instance.
        instance = get_instance_by_module(module)
        qubo = assemble(instance, compute_time_windows(instance), get_penalties_by_params(module.params))

        # Enumerate and summarise the spectrum.
        spectrum = enumerate_spectrum(qubo)
        summary = spectrum_summary(spectrum, qubo, instance, bins=module.params['bins'])
        module.json_log({'msg': 'enumerated spectrum', 'states': summary.states, 'gap': summary.gap})
        document = dict(summary.to_json(), nvars=qubo.n, qubo=qubo.summary())

        # Write the spectrum document, if requested.
        changed = False
        path = module.params['path']
        if path:
            changed = module.write_document(path, write_document('spectrum', document))
        module.exit_json(changed=changed, spectrum=document)

    # Notify Ansible of the exception.
    except Exception as e:
        module.fail_json(msg=to_native(e))


if __name__ == '__main__':
    main()
