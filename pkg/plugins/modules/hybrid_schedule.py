#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from ..module_utils.document_utils import write_document
from ..module_utils.hybrid_orchestrator import run_hybrid
from ..module_utils.module import RailschedModule
from ..module_utils.samplers import BACKENDS, ENUMERATE
from ..module_utils.utils import SEED_ENV, get_instance_by_module, get_penalties_by_params, get_sampler_config_by_params

from ansible.module_utils.basic import env_fallback
from ansible.module_utils._text import to_native

ANSIBLE_METADATA = {'metadata_version': '1.1',
                    'status': ['preview'],
                    'supported_by': 'community'}

DOCUMENTATION = '''
---
module: hybrid_schedule
short_description: Reschedule an instance with the hybrid sampler and ILP loop
description:
    - Split an instance into a stochastic zone, solved by sampling its QUBO, and deterministic segments, solved exactly.
    - Representative timetables of the zone are fixed at its boundary, the segments are solved around them and the
      recombined timetables are kept in a portfolio ordered by their joint objective.
    - Iterates until the joint objective stops improving or I(iterations) is reached.
author: railsched contributors
options:
    instance:
        description:
            - The instance to reschedule.
            - You can pass a string, which is the path to an instance document written by the M(rail_instance) module.
            - You can also pass a dict, which must match the result format of the M(rail_instance) module.
        type: raw
        required: true
    zone:
        description:
            - The stations of the stochastic zone. They must be contiguous on every route that visits them.
        type: list
        elements: str
        required: true
    backend:
        description:
            - The sampler used for the stochastic zone.
        type: str
        default: enumerate
        choices:
            - enumerate
            - anneal
            - qaoa
    iterations:
        description:
            - The maximal number of iterations.
        type: int
        default: 5
    representatives:
        description:
            - The number of zone timetables passed to the exact solver per iteration.
        type: int
        default: 3
    penalties:
        description:
            - The penalty regime of the zone QUBO.
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
    disturbance_threshold:
        description:
            - Reject an iteration when the passing times of the zone are further than this distance from the
              disturbance model of the instance.
        type: float
    shots:
        description:
            - The number of samples per iteration.
        type: int
    sweeps:
        description:
            - The number of Metropolis sweeps per shot for C(anneal).
        type: int
        default: 1000
    layers:
        description:
            - The number of QAOA layers.
        type: int
        default: 1
    max_evaluations:
        description:
            - The number of circuit evaluations the QAOA angle search may use.
        type: int
        default: 50
    threads:
        description:
            - The number of worker threads used for the exact solves.
        type: int
        default: 1
    seed:
        description:
            - The seed of the sampler.
            - If not given, the value of the C(RAILSCHED_SEED) environment variable is used, else 0.
        type: int
    path:
        description:
            - If given, write the hybrid result document to this path.
        type: str
notes: []
requirements: []
'''

EXAMPLES = '''
- name: Reschedule the reference instance with an annealed stochastic zone
  railsched.rescheduling.hybrid_schedule:
    instance: appendix.json
    zone:
      - MR
      - CS
    backend: anneal
    iterations: 3
    path: appendix-hybrid.json
'''

RETURN = '''
---
hybrid:
    description:
        - The hybrid result.
    type: dict
    contains:
        iterations:
            description:
                - The number of iterations run.
            type: int
        converged:
            description:
                - True if the loop stopped because the joint objective stopped improving.
            type: bool
        best_joint_objective:
            description:
                - The joint objective of the best timetable in the portfolio.
            type: float
            sample: 6.0
        portfolio:
            description:
                - The recombined timetables, best first.
            type: list
            elements: dict
        history:
            description:
                - The best joint objective of every iteration.
            type: list
'''


def main():

    # Create the module.
    argument_spec = dict(
        instance=dict(type='raw', required=True),
        zone=dict(type='list', elements='str', required=True),
        backend=dict(type='str', default=ENUMERATE, choices=list(BACKENDS)),
        iterations=dict(type='int', default=5),
        representatives=dict(type='int', default=3),
        penalties=dict(type='str', default='split', choices=['overlapping', 'split', 'custom']),
        p_sum=dict(type='float'),
        p_pair=dict(type='float'),
        disturbance_threshold=dict(type='float'),
        shots=dict(type='int'),
        sweeps=dict(type='int', default=1000),
        layers=dict(type='int', default=1),
        max_evaluations=dict(type='int', default=50),
        threads=dict(type='int', default=1),
        seed=dict(type='int', fallback=(env_fallback, [SEED_ENV])),
        path=dict(type='str')
    )
    required_if = [
        ('penalties', 'custom', ['p_sum', 'p_pair'])
    ]
    module = RailschedModule(argument_spec=argument_spec, supports_check_mode=True, required_if=required_if)

    # Ensure all exceptions are caught.
    try:

        # Configure the run.
        instance = get_instance_by_module(module)
        backend = module.params['backend']
        config = None
        if backend != ENUMERATE:
            config = get_sampler_config_by_params(backend, module.params)

        # Run the hybrid loop.
        result = run_hybrid(
            instance,
            module.params['zone'],
            backend=backend,
            budget=module.params['iterations'],
            k_representatives=module.params['representatives'],
            penalties=get_penalties_by_params(module.params),
            sampler_config=config,
            disturbance_threshold=module.params['disturbance_threshold'],
            workers=module.params['threads']
        )
        document = result.to_json()
        module.json_log({'msg': 'ran hybrid loop', 'iterations': result.iterations, 'best': document['best_joint_objective']})

        # Write the result document, if requested.
        changed = False
        path = module.params['path']
        if path:
            changed = module.write_document(path, write_document('hybrid', document))
        module.exit_json(changed=changed, hybrid=document)

    # Notify Ansible of the exception.
    except Exception as e:
        module.fail_json(msg=to_native(e))


if __name__ == '__main__':
    main()
