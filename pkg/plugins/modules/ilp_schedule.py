#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from ..module_utils.analysis import check_timetable
from ..module_utils.document_utils import write_document
from ..module_utils.errors import ParameterException
from ..module_utils.ilp_engine import build_ilp, solve_exact, sweep_stochastic, sweep_to_json
from ..module_utils.module import RailschedModule
from ..module_utils.network_model import compute_time_windows
from ..module_utils.utils import get_instance_by_module, parse_edge

from ansible.module_utils._text import to_native

ANSIBLE_METADATA = {'metadata_version': '1.1',
                    'status': ['preview'],
                    'supported_by': 'community'}

DOCUMENTATION = '''
---
module: ilp_schedule
short_description: Solve a railway rescheduling instance exactly
description:
    - Solve the integer linear program of an instance with branch and bound and return the optimal timetable.
    - Optionally sweep every realization of the disturbance model over one or more stochastic edges.
author: railsched contributors
options:
    instance:
        description:
            - The instance to solve.
            - You can pass a string, which is the path to an instance document written by the M(rail_instance) module.
            - You can also pass a dict, which must match the result format of the M(rail_instance) module.
        type: raw
        required: true
    stochastic_edges:
        description:
            - Edges of the stochastic zone, each given as C(FROM:TO).
            - Every combination of extra delays from the disturbance model of the instance is solved.
        type: list
        elements: str
        default: []
    threads:
        description:
            - The number of worker threads used for the sweep.
        type: int
        default: 1
    path:
        description:
            - If given, write the solution document to this path.
        type: str
notes: []
requirements: []
'''

EXAMPLES = '''
- name: Solve the reference instance
  railsched.rescheduling.ilp_schedule:
    instance: appendix.json
  register: result

- name: Sweep the disturbance model over the MR to CS edge
  railsched.rescheduling.ilp_schedule:
    instance: appendix-stochastic.json
    stochastic_edges:
      - MR:CS
    path: appendix-sweep.json
'''

RETURN = '''
---
solution:
    description:
        - The solution of the integer linear program.
    type: dict
    contains:
        status:
            description:
                - C(Optimal) or C(Infeasible).
            type: str
            sample: Optimal
        objective_value:
            description:
                - The weighted secondary delay of the timetable.
            type: float
            sample: 6.0
        times:
            description:
                - The time of every train at every station.
            type: list
            elements: dict
violations:
    description:
        - Constraint violations found by checking the timetable independently of the solver.
    type: list
    elements: dict
sweep:
    description:
        - One solution per realization of the disturbance model.
    returned: when I(stochastic_edges) is given
    type: list
    elements: dict
'''


def main():

    # Create the module.
    argument_spec = dict(
        instance=dict(type='raw', required=True),
        stochastic_edges=dict(type='list', elements='str', default=list()),
        threads=dict(type='int', default=1),
        path=dict(type='str')
    )
    module = RailschedModule(argument_spec=argument_spec, supports_check_mode=True)

    # Ensure all exceptions are caught.
    try:

        # Build and solve the program.
        instance = get_instance_by_module(module)
        windows = compute_time_windows(instance)
        solution = solve_exact(build_ilp(instance, windows))
        module.json_log({'msg': 'solved ilp', 'status': solution.status, 'objective': solution.objective_value})

        # Check the timetable with the independent checker.
        document = dict(
            solution=solution.to_json(),
            violations=[violation.to_json() for violation in check_timetable(instance, solution.times)] if solution.is_optimal() else list()
        )

        # Sweep the stochastic edges, if requested.
        if module.params['stochastic_edges']:
            if instance.disturbance is None:
                raise ParameterException('MissingDisturbanceModel', 'Sweeping stochastic edges needs an instance with a disturbance model')
            edges = [parse_edge(edge) for edge in module.params['stochastic_edges']]
            sweep = sweep_stochastic(instance, windows, instance.disturbance, edges, workers=module.params['threads'])
            document['sweep'] = sweep_to_json(instance.disturbance, sweep)

        # Write the solution document, if requested.
        changed = False
        path = module.params['path']
        if path:
            changed = module.write_document(path, write_document('ilp-solution', document))
        module.exit_json(changed=changed, **document)

    # Notify Ansible of the exception.
    except Exception as e:
        module.fail_json(msg=to_native(e))


if __name__ == '__main__':
    main()
