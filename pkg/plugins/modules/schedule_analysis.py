#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from ..module_utils.analysis import analyse_sampleset, export_train_diagram, total_variation_distance
from ..module_utils.document_utils import load_histogram_csv, write_document, write_histogram, write_train_diagram
from ..module_utils.file_utils import read_text
from ..module_utils.module import RailschedModule
from ..module_utils.utils import get_instance_by_module, parse_edge, read_sampleset

from ansible.module_utils._text import to_native

ANSIBLE_METADATA = {'metadata_version': '1.1',
                    'status': ['preview'],
                    'supported_by': 'community'}

DOCUMENTATION = '''
---
module: schedule_analysis
short_description: Analyse the timetables decoded from a sample file
description:
    - Decode every sample of a sample file into a timetable and check it against the constraints of the instance.
    - Reports the feasible fraction of the samples, the best feasible timetable and the distribution of passing times
      over one edge of the line.
author: railsched contributors
options:
    instance:
        description:
            - The instance the samples were drawn for.
            - You can pass a string, which is the path to an instance document written by the M(rail_instance) module.
            - You can also pass a dict, which must match the result format of the M(rail_instance) module.
        type: raw
        required: true
    samples:
        description:
            - The path of a sample file written by the M(sample_set) module.
        type: str
        required: true
    edge:
        description:
            - The edge, given as C(FROM:TO), whose passing times are collected.
        type: str
        default: MR:CS
    relaxed:
        description:
            - Count timetables that only violate minimal passing times in the passing time histogram.
        type: bool
        default: false
    compare_path:
        description:
            - The path of a reference histogram, as C(bin_start,count) rows, to compare the passing times against.
        type: str
    histogram_path:
        description:
            - If given, write the passing time histogram to this path.
        type: str
    diagram_path:
        description:
            - If given, write the train diagram rows of the best feasible timetable to this path.
        type: str
    path:
        description:
            - If given, write the analysis document to this path.
        type: str
notes: []
requirements: []
'''

EXAMPLES = '''
- name: Analyse the annealing samples of the reference instance
  railsched.rescheduling.schedule_analysis:
    instance: appendix.json
    samples: appendix-anneal.csv
    edge: MR:CS
    histogram_path: appendix-anneal-histogram.csv
    diagram_path: appendix-anneal-diagram.csv
  register: result

- name: Fail if no feasible timetable was sampled
  fail:
    msg: No feasible timetable
  when: result.analysis.best is none
'''

RETURN = '''
---
analysis:
    description:
        - The analysis of the samples.
    type: dict
    contains:
        nvars:
            description:
                - The number of QUBO variables of the instance.
            type: int
            sample: 18
        shots:
            description:
                - The total number of samples.
            type: int
        feasible_fraction:
            description:
                - The fraction of samples that decode to a feasible timetable.
            type: float
        relaxed_fraction:
            description:
                - The fraction of samples that only violate minimal passing times, or nothing.
            type: float
        best_objective:
            description:
                - The objective of the best feasible timetable.
            type: float
            sample: 6.0
        best:
            description:
                - The best feasible timetable with its passing times.
            type: dict
        histogram:
            description:
                - The passing time histogram over I(edge).
            type: dict
        total_variation_distance:
            description:
                - The distance between the passing time distribution and the reference in I(compare_path).
            returned: when I(compare_path) is given
            type: float
'''


def main():

    # Create the module.
    argument_spec = dict(
        instance=dict(type='raw', required=True),
        samples=dict(type='str', required=True),
        edge=dict(type='str', default='MR:CS'),
        relaxed=dict(type='bool', default=False),
        compare_path=dict(type='str'),
        histogram_path=dict(type='str'),
        diagram_path=dict(type='str'),
        path=dict(type='str')
    )
    module = RailschedModule(argument_spec=argument_spec, supports_check_mode=True)

    # Ensure all exceptions are caught.
    try:

        # Decode and analyse the samples.
        instance = get_instance_by_module(module)
        sampleset = read_sampleset(module.params['samples'])
        edge = parse_edge(module.params['edge'])
        document, histogram, best = analyse_sampleset(instance, sampleset, edge, module.params['relaxed'])
        module.json_log({'msg': 'analysed samples', 'shots': document['shots'], 'feasible_fraction': document['feasible_fraction']})

        # Compare against the reference histogram, if given.
        compare_path = module.params['compare_path']
        if compare_path:
            reference = load_histogram_csv(read_text(compare_path), compare_path, edge)
            document['total_variation_distance'] = total_variation_distance(histogram, reference) if not histogram.empty else None

        # Write the requested outputs.
        changed = False
        if module.params['histogram_path']:
            changed = module.write_document(module.params['histogram_path'], write_histogram(histogram)) or changed
        if module.params['diagram_path'] and best is not None:
            rows = export_train_diagram(best, instance)
            changed = module.write_document(module.params['diagram_path'], write_train_diagram(rows)) or changed
        if module.params['path']:
            changed = module.write_document(module.params['path'], write_document('analysis', document)) or changed
        module.exit_json(changed=changed, analysis=document)

    # Notify Ansible of the exception.
    except Exception as e:
        module.fail_json(msg=to_native(e))


if __name__ == '__main__':
    main()
