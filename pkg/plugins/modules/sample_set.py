#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from ..module_utils.document_utils import write_sampleset
from ..module_utils.ising_engine import to_ising
from ..module_utils.module import RailschedModule
from ..module_utils.samplers import BACKENDS, ENUMERATE, sample_qubo
from ..module_utils.utils import SEED_ENV, get_sampler_config_by_params, read_qubo

from ansible.module_utils.basic import env_fallback
from ansible.module_utils._text import to_native

ANSIBLE_METADATA = {'metadata_version': '1.1',
                    'status': ['preview'],
                    'supported_by': 'community'}

DOCUMENTATION = '''
---
module: sample_set
short_description: Manage a sample file drawn from a QUBO
description:
    - Sample a QUBO file with exhaustive enumeration, simulated annealing or an emulated QAOA circuit, and write the
      aggregated samples to a CSV file.
    - Sampling is deterministic for a given seed, so running the module again does not change the file.
author: railsched contributors
options:
    state:
        description:
            - C(absent) - The sample file at I(path) will be removed if it exists.
            - C(present) - The sample file at I(path) will be written, or rewritten if its content would change.
        type: str
        default: present
        choices:
            - absent
            - present
    path:
        description:
            - The path of the sample file.
        type: str
        required: true
    qubo:
        description:
            - The path of a QUBO file written by the M(qubo_model) module.
        type: str
    backend:
        description:
            - C(enumerate) - Every state, in ascending energy order.
            - C(anneal) - Simulated annealing with Metropolis updates.
            - C(qaoa) - A state vector emulation of QAOA with optimized angles.
        type: str
        default: enumerate
        choices:
            - enumerate
            - anneal
            - qaoa
    limit:
        description:
            - The number of lowest energy states written by the C(enumerate) backend.
        type: int
        default: 1024
    shots:
        description:
            - The number of samples. Defaults to 1000 for C(anneal) and 1024 for C(qaoa).
        type: int
    sweeps:
        description:
            - The number of Metropolis sweeps per shot for C(anneal).
        type: int
        default: 1000
    beta_min:
        description:
            - The initial inverse temperature for C(anneal).
        type: float
        default: 0.1
    beta_max:
        description:
            - The final inverse temperature for C(anneal).
        type: float
        default: 10.0
    pair_moves:
        description:
            - Also propose flips of coupled spin pairs for C(anneal).
        type: bool
        default: true
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
    noise:
        description:
            - The weight, between 0 and 1, of the global depolarizing mix applied to the QAOA output.
        type: float
        default: 0.0
    calibrated_noise:
        description:
            - Derive the depolarizing weight from the two-qubit gate count of the circuit instead of I(noise).
        type: bool
        default: false
    two_qubit_error:
        description:
            - The two-qubit gate error used by I(calibrated_noise).
        type: float
        default: 0.0425
    seed:
        description:
            - The seed of the sampler.
            - If not given, the value of the C(RAILSCHED_SEED) environment variable is used, else 0.
        type: int
notes: []
requirements: []
'''

EXAMPLES = '''
- name: Sample the reference QUBO with simulated annealing
  railsched.rescheduling.sample_set:
    state: present
    path: appendix-anneal.csv
    qubo: appendix.qubo
    backend: anneal
    shots: 1000
    seed: 1

- name: Sample the reference QUBO with a noisy QAOA emulation
  railsched.rescheduling.sample_set:
    state: present
    path: appendix-qaoa.csv
    qubo: appendix.qubo
    backend: qaoa
    layers: 2
    calibrated_noise: true
'''

RETURN = '''
---
samples:
    description:
        - A summary of the samples.
    returned: when I(state) is C(present)
    type: dict
    contains:
        shots:
            description:
                - The total number of samples.
            type: int
            sample: 1000
        distinct:
            description:
                - The number of distinct bitstrings.
            type: int
        best_energy:
            description:
                - The lowest QUBO energy found.
            type: float
        mean_energy:
            description:
                - The count weighted mean QUBO energy.
            type: float
        sampler_meta:
            description:
                - Backend specific information, such as the optimized QAOA angles.
            type: dict
'''


def main():

    # Create the module.
    argument_spec = dict(
        state=dict(type='str', default='present', choices=['present', 'absent']),
        path=dict(type='str', required=True),
        qubo=dict(type='str'),
        backend=dict(type='str', default=ENUMERATE, choices=list(BACKENDS)),
        limit=dict(type='int', default=1024),
        shots=dict(type='int'),
        sweeps=dict(type='int', default=1000),
        beta_min=dict(type='float', default=0.1),
        beta_max=dict(type='float', default=10.0),
        pair_moves=dict(type='bool', default=True),
        layers=dict(type='int', default=1),
        max_evaluations=dict(type='int', default=50),
        noise=dict(type='float', default=0.0),
        calibrated_noise=dict(type='bool', default=False),
        two_qubit_error=dict(type='float', default=0.0425),
        seed=dict(type='int', fallback=(env_fallback, [SEED_ENV]))
    )
    required_if = [
        ('state', 'present', ['qubo'])
    ]
    module = RailschedModule(argument_spec=argument_spec, supports_check_mode=True, required_if=required_if)

    # Ensure all exceptions are caught.
    try:

        # If the samples should not exist, handle that now.
        path = module.params['path']
        state = module.params['state']
        if state == 'absent':
            changed = module.remove_document(path)
            return module.exit_json(changed=changed)

        # Load the QUBO and configure the sampler.
        qubo = read_qubo(module.params['qubo'])
        backend = module.params['backend']
        config = None
        if backend != ENUMERATE:
            config = get_sampler_config_by_params(backend, module.params, to_ising(qubo))

        # Sample the QUBO.
        sampleset = sample_qubo(qubo, backend, config, limit=module.params['limit'])
        module.json_log({'msg': 'sampled qubo', 'backend': backend, 'shots': sampleset.shots(), 'distinct': len(sampleset)})

        # Write the samples.
        changed = module.write_document(path, write_sampleset(sampleset))
        summary = dict(shots=sampleset.shots(), distinct=len(sampleset), sampler_meta=sampleset.sampler_meta)
        if len(sampleset):
            summary['best_energy'] = sampleset.best().energy
            summary['mean_energy'] = sampleset.mean_energy()
        module.exit_json(changed=changed, samples=summary)

    # Notify Ansible of the exception.
    except Exception as e:
        module.fail_json(msg=to_native(e))


if __name__ == '__main__':
    main()
